"""Twisted convolution algebra of G_N (open domain) and Ǧ_N (closed domain).

Elements are chamberwise-constant: on chamber ``c`` an element is a matrix
indexed by the open signature (open domain) or the closure signature (closed
domain).  All operations act chamber by chamber.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cocycles import CocycleData, CocycleError
from .finite_level import LevelView

DOMAINS = ("open", "closed")


class AlgebraError(ValueError):
    pass


class AlgebraElement:
    def __init__(self, view: LevelView, domain: str, blocks: Sequence[np.ndarray]):
        if domain not in DOMAINS:
            raise AlgebraError(f"domain must be one of {DOMAINS}")
        if len(blocks) != len(view.chambers):
            raise AlgebraError(f"expected {len(view.chambers)} chamber blocks, got {len(blocks)}")
        clean = []
        for ch, b in zip(view.chambers, blocks):
            b = np.asarray(b, dtype=complex)
            k = len(ch.signature(domain))
            if b.shape != (k, k):
                raise AlgebraError(f"block shape {b.shape} does not match signature size {k}")
            clean.append(b)
        self.view = view
        self.domain = domain
        self.blocks = tuple(clean)

    @property
    def level(self) -> int:
        return self.view.level

    @property
    def seq(self):
        return self.view.seq

    def __repr__(self) -> str:
        return f"AlgebraElement(level={self.level}, domain={self.domain}, chambers={len(self.blocks)})"

    def _same_shape(self, other: AlgebraElement) -> None:
        if other.view is not self.view and (other.seq != self.seq or other.level != self.level):
            raise AlgebraError("elements live at different levels")
        if other.domain != self.domain:
            raise AlgebraError("elements have different domains")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._same_shape(other)
        return AlgebraElement(self.view, self.domain, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        self._same_shape(other)
        return AlgebraElement(self.view, self.domain, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, scalar: complex) -> AlgebraElement:
        return AlgebraElement(self.view, self.domain, [scalar * b for b in self.blocks])

    __rmul__ = __mul__

    def entry(self, i: int, a, b) -> complex:
        pos = self.view.chambers[i].position(self.domain)
        if a not in pos or b not in pos:
            return 0j
        return complex(self.blocks[i][pos[a], pos[b]])

    def max_abs_diff(self, other: AlgebraElement) -> float:
        self._same_shape(other)
        return max((float(np.max(np.abs(a - b))) if a.size else 0.0) for a, b in zip(self.blocks, other.blocks))

    def to_closed(self) -> AlgebraElement:
        """Zero-pad an open-domain element to the closure signatures."""
        if self.domain == "closed":
            return self
        blocks = []
        for ch, b in zip(self.view.chambers, self.blocks):
            k = len(ch.closure_signature)
            out = np.zeros((k, k), dtype=complex)
            pos = np.array(ch.open_in_closure, dtype=int)
            if len(pos):
                out[np.ix_(pos, pos)] = b
            blocks.append(out)
        return AlgebraElement(self.view, "closed", blocks)


def zero(view: LevelView, domain: str = "open") -> AlgebraElement:
    return AlgebraElement(view, domain, [np.zeros((len(ch.signature(domain)),) * 2, dtype=complex) for ch in view.chambers])


def unit_section(view: LevelView, domain: str = "open") -> AlgebraElement:
    """The function equal to 1 on units and 0 elsewhere."""
    return AlgebraElement(view, domain, [np.eye(len(ch.signature(domain)), dtype=complex) for ch in view.chambers])


def matrix_unit(view: LevelView, chamber: int, a, b, domain: str = "open", value: complex = 1.0) -> AlgebraElement:
    f = zero(view, domain)
    pos = view.chambers[chamber].position(domain)
    if a not in pos or b not in pos:
        raise AlgebraError(f"({a}, {b}) is not in the {domain} fiber of chamber {chamber}")
    blocks = [b_.copy() for b_ in f.blocks]
    blocks[chamber][pos[a], pos[b]] = value
    return AlgebraElement(view, domain, blocks)


def random_element(view: LevelView, rng: np.random.Generator, domain: str = "open") -> AlgebraElement:
    """Complex Gaussian entries on every chamber block."""
    blocks = []
    for ch in view.chambers:
        k = len(ch.signature(domain))
        blocks.append(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
    return AlgebraElement(view, domain, blocks)


def _check(f: AlgebraElement, sigma: CocycleData) -> None:
    if sigma.view is not f.view and (sigma.seq != f.seq or sigma.level != f.level):
        raise CocycleError("cocycle and element live at different levels")


def convolve(f: AlgebraElement, g: AlgebraElement, sigma: CocycleData) -> AlgebraElement:
    """``(f*g)[a, c] = sum_b f[a, b] g[b, c] sigma[a, b, c]`` on each chamber."""
    f._same_shape(g)
    _check(f, sigma)
    blocks = []
    for i, (fb, gb) in enumerate(zip(f.blocks, g.blocks)):
        s = sigma.phases(i, f.domain)
        blocks.append(np.einsum("ab,bc,abc->ac", fb, gb, s))
    return AlgebraElement(f.view, f.domain, blocks)


def involution(f: AlgebraElement, sigma: CocycleData) -> AlgebraElement:
    """``f*[a, b] = conj(f[b, a] sigma[a, b, a])``."""
    _check(f, sigma)
    blocks = []
    for i, fb in enumerate(f.blocks):
        s = sigma.phases(i, f.domain)
        k = fb.shape[0]
        s_aba = s[np.arange(k)[:, None], np.arange(k)[None, :], np.arange(k)[:, None]]
        blocks.append(np.conj(fb.T * s_aba))
    return AlgebraElement(f.view, f.domain, blocks)


def i_norm(f: AlgebraElement, sigma: CocycleData | None = None) -> float:
    """Max of the range-fiber and source-fiber absolute sums.

    Range sums are row sums of ``|f|``; the sums for ``f*`` are the column
    sums since the cocycle has modulus one, so ``sigma`` is not needed.
    """
    best = 0.0
    for fb in f.blocks:
        if fb.size:
            a = np.abs(fb)
            best = max(best, float(a.sum(axis=1).max()), float(a.sum(axis=0).max()))
    return best


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value; closed forms for 1x1 and 2x2."""
    if m.size == 0:
        return 0.0
    if m.shape == (1, 1):
        return float(abs(m[0, 0]))
    if m.shape == (2, 2):
        fro = float(np.sum(np.abs(m) ** 2))
        det = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        disc = max(fro * fro - 4 * det * det, 0.0)
        return float(np.sqrt((fro + np.sqrt(disc)) / 2))
    return float(np.linalg.norm(m, 2))


@dataclass
class RepMatrix:
    chamber: int
    basepoint: tuple
    matrix: np.ndarray

    @property
    def norm(self) -> float:
        return operator_norm(self.matrix)


def ind_point_mass(f: AlgebraElement, sigma: CocycleData, chamber: int, basepoint) -> RepMatrix:
    """Matrix of the representation induced from the unit ``(g, t, g)``, ``t`` in ``chamber``.

    It acts on the fiber indexed by the signature:
    ``T[a, b] = f[a, b] sigma[a, b, g]``.
    """
    _check(f, sigma)
    ch = f.view.chambers[chamber]
    pos = ch.position(f.domain)
    if basepoint not in pos:
        raise AlgebraError(f"{basepoint} is not in the {f.domain} signature of chamber {chamber}")
    s = sigma.phases(chamber, f.domain)
    return RepMatrix(chamber, basepoint, f.blocks[chamber] * s[:, :, pos[basepoint]])


def reduced_norm(f: AlgebraElement, sigma: CocycleData) -> float:
    """Max over chambers and basepoints of the induced point-mass norms."""
    _check(f, sigma)
    best = 0.0
    for i, ch in enumerate(f.view.chambers):
        fb = f.blocks[i]
        if not fb.size:
            continue
        s = sigma.phases(i, f.domain)
        for g in range(fb.shape[0]):
            best = max(best, operator_norm(fb * s[:, :, g]))
    return best


def element_norms(f: AlgebraElement, sigma: CocycleData) -> list[dict]:
    """Per-chamber breakdown used by reports."""
    rows = []
    for i, ch in enumerate(f.view.chambers):
        fb = f.blocks[i]
        s = sigma.phases(i, f.domain)
        norms = [operator_norm(fb * s[:, :, g]) for g in range(fb.shape[0])]
        rows.append(
            {
                "chamber": i,
                "region": str(ch.region),
                "size": int(fb.shape[0]),
                "reduced_norm": max(norms) if norms else 0.0,
                "row_sum": float(np.abs(fb).sum(axis=1).max()) if fb.size else 0.0,
                "column_sum": float(np.abs(fb).sum(axis=0).max()) if fb.size else 0.0,
            }
        )
    return rows
