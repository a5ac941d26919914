"""Cylinder functions on the limit groupoid G and the embeddings ``phi_n``.

``phi_n(f)`` is evaluated pointwise on limit arrows.  Its reduced norm is
computed from the limit groupoid alone (predicates, limit cocycle, point-mass
representations at units of G), so comparing it with the level-``n`` norm is
a genuine check of isometry rather than a restatement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from . import region as rg
from .cocycles import CocycleData, CocycleError, LimitCocycle, limit_eval, random_coboundary, trivial_at
from .convolution import AlgebraElement, AlgebraError, matrix_unit, operator_norm, random_element, reduced_norm
from .covers import (
    CoverError,
    CoverSequence,
    MultiIndex,
    OmegaPoint,
    count_multi_indices,
    example_A,
    greedy_sequence,
    locate,
    omega_size,
    uhf,
    w_region,
)
from .finite_level import in_GN, level_view
from .limit import LimitArrow, format_arrow, in_G, in_Yn, project

NORM_TOL = 1e-8


class CylinderCheckError(AssertionError):
    """Raised when the one-level-deeper enumeration disagrees with the base one."""


@dataclass(frozen=True, eq=False)
class CylinderElement:
    payload: AlgebraElement
    cocycle: LimitCocycle

    @property
    def level(self) -> int:
        return self.payload.level

    @property
    def seq(self) -> CoverSequence:
        return self.payload.seq


def phi(f: AlgebraElement, L: LimitCocycle, sigma_n: Optional[CocycleData] = None) -> CylinderElement:
    """Wrap a level-``n`` element as a function on G.

    ``sigma_n``, when given, must be the pullback of ``L`` to level ``n``.
    """
    if f.domain != "open":
        raise AlgebraError("phi takes open-domain elements")
    if L.seq != f.seq:
        raise CocycleError("cocycle and element use different cover sequences")
    if L.base_level > f.level:
        raise CocycleError(f"limit cocycle is based at level {L.base_level} above {f.level}")
    if sigma_n is not None and not sigma_n.same_as(L.at_level(f.level)):
        raise CocycleError("sigma_n is not the pullback of the limit cocycle")
    return CylinderElement(f, L)


@lru_cache(maxsize=None)
def cylinder_support(seq: CoverSequence, n: int, x: LimitArrow) -> Optional[tuple[int, MultiIndex, MultiIndex]]:
    """``(chamber, alpha|n, beta|n)`` when cylinder functions at level ``n`` may be nonzero at ``x``."""
    if not in_Yn(seq, x, n):
        return None
    a = project(x, n)
    if not in_GN(seq, a) or not in_G(seq, x)[0]:
        return None
    return locate(seq, n, x.t), a.alpha, a.beta


def eval_cylinder(c: CylinderElement, x: LimitArrow) -> complex:
    s = cylinder_support(c.seq, c.level, x)
    if s is None:
        return 0j
    return c.payload.entry(*s)


def cylinder_convolve_at(c1: CylinderElement, c2: CylinderElement, x: LimitArrow) -> complex:
    """``(phi(f) * phi(g))(x)`` summed over the arrows ``y`` of G ending where ``x`` does.

    Only ``y = (alpha, t, p + tail)`` with ``p`` a level-``n`` prefix and the
    tail of ``alpha`` can contribute.
    """
    if c1.level != c2.level or c1.seq != c2.seq:
        raise AlgebraError("cylinder elements live at different levels")
    seq, n = c1.seq, c1.level
    tail = x.alpha.tail_from(n + 1)
    candidates = level_view(seq, n).chambers[locate(seq, n, x.t)].closure_signature
    total = 0j
    for p in candidates:
        e = tail.with_prefix(p)
        y = LimitArrow(x.alpha, x.t, e)
        rest = LimitArrow(e, x.t, x.beta)
        a, b = eval_cylinder(c1, y), eval_cylinder(c2, rest)
        if a != 0 and b != 0:
            total += a * b * limit_eval(c1.cocycle, y, rest)
    return total


def cylinder_involution_at(c: CylinderElement, x: LimitArrow) -> complex:
    """``conj(phi(f)(x^-1) sigma(x, x^-1))``."""
    v = eval_cylinder(c, x.inverse())
    if v == 0:
        return 0j
    return complex(np.conj(v * limit_eval(c.cocycle, x, x.inverse())))


# -- reduced norm through point masses on G ----------------------------------------------


@dataclass
class _Block:
    chamber: int  # level-n chamber of the base point
    t: Fraction
    gamma: OmegaPoint
    rows: tuple[MultiIndex, ...]
    arrows: list  # (i, j, x, y) for entries where the cylinder may be nonzero
    pos: np.ndarray  # open-signature positions of the rows
    mask: np.ndarray


@lru_cache(maxsize=None)
def _blocks(seq: CoverSequence, n: int, depth: int) -> tuple[_Block, ...]:
    """Index structure of the point-mass representations at chosen units of G.

    For each level-``(n + depth)`` chamber and each closure-signature index
    ``g`` there, the unit ``(gamma, t, gamma)`` has ``gamma = g`` followed by
    greedy members containing ``t``.  The fiber block uses arrows whose legs
    share gamma's tail beyond ``n``; blocks for other tails are principal
    submatrices of level-``n`` blocks and are dominated.
    """
    m = n + depth
    view_n = level_view(seq, n)
    out = []
    for ch in level_view(seq, m).chambers:
        t = ch.sample
        i = view_n.locate(t)
        parent = view_n.chambers[i]
        greedy = greedy_sequence(seq, t, m + 1)
        for g in ch.closure_signature:
            gamma = greedy.with_prefix(g)
            if not in_G(seq, LimitArrow(gamma, t, gamma))[0]:
                continue
            tail = gamma.tail_from(n + 1)
            rows = tuple(p for p in parent.closure_signature if in_G(seq, LimitArrow(tail.with_prefix(p), t, gamma))[0])
            k = len(rows)
            mask = np.zeros((k, k), dtype=bool)
            pos = np.array([parent.open_position.get(p, 0) for p in rows], dtype=int)
            arrows = []
            for r, p in enumerate(rows):
                for s, q in enumerate(rows):
                    x = LimitArrow(tail.with_prefix(p), t, tail.with_prefix(q))
                    supp = cylinder_support(seq, n, x)
                    if supp is None:
                        continue
                    if supp[0] != i:
                        raise CoverError("cylinder support left the base chamber")
                    mask[r, s] = True
                    arrows.append((r, s, x, LimitArrow(x.beta, t, gamma)))
            out.append(_Block(i, t, gamma, rows, arrows, pos, mask))
    return tuple(out)


def _phases(L: LimitCocycle, n: int, depth: int) -> list[np.ndarray]:
    """Limit-cocycle factors for every block, zero off the cylinder support."""
    key = ("cylinder", n, depth)
    if key not in L._cache:
        mats = []
        for blk in _blocks(L.seq, n, depth):
            k = len(blk.rows)
            s = np.zeros((k, k), dtype=complex)
            for r, c, x, y in blk.arrows:
                s[r, c] = limit_eval(L, x, y)
            mats.append(s)
        L._cache[key] = mats
    return L._cache[key]


def _norm_at_depth(c: CylinderElement, depth: int) -> float:
    best = 0.0
    blocks = _blocks(c.seq, c.level, depth)
    for blk, s in zip(blocks, _phases(c.cocycle, c.level, depth)):
        fb = c.payload.blocks[blk.chamber]
        if not len(blk.rows) or not fb.size:
            continue
        best = max(best, operator_norm(fb[np.ix_(blk.pos, blk.pos)] * s))
    return best


def reduced_norm_cylinder(c: CylinderElement, depth: int = 0, check: bool = True, tol: float = NORM_TOL) -> float:
    """Sup over the chosen units of G of the point-mass representation norms.

    With ``check`` the enumeration is repeated one level deeper and the two
    values must agree within ``tol`` (relative to ``max(1, norm)``).
    """
    value = _norm_at_depth(c, depth)
    if check:
        deeper = _norm_at_depth(c, depth + 1)
        if abs(deeper - value) > tol * max(1.0, value):
            raise CylinderCheckError(f"depth {depth} gives {value}, depth {depth + 1} gives {deeper}")
    return value


# -- isometry ---------------------------------------------------------------------------------


@dataclass
class IsometryReport:
    seq: str
    level: int
    cocycle: str
    seed: int
    trials: int
    passed: int
    max_error: float
    tolerance: float
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def as_dict(self) -> dict:
        return {
            "sequence": self.seq,
            "level": self.level,
            "cocycle": self.cocycle,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "ok": self.ok,
        }


def limit_cocycle(seq: CoverSequence, level: int, kind: str = "trivial", seed: int = 0) -> LimitCocycle:
    if kind == "trivial":
        return LimitCocycle(trivial_at(seq, level))
    if kind == "coboundary":
        return LimitCocycle(random_coboundary(level_view(seq, level), seed))
    raise CocycleError(f"unknown cocycle kind {kind!r}")


def isometry_check(
    seq: CoverSequence, level: int, seed: int = 0, trials: int = 50, cocycle: str = "trivial", tol: float = NORM_TOL
) -> IsometryReport:
    """Compare ``||phi_n(f)||`` with ``||f||`` on seeded random elements."""
    L = limit_cocycle(seq, level, cocycle, seed)
    sigma = L.at_level(level)
    view = level_view(seq, level)
    rng = np.random.default_rng(seed)
    passed, worst, rows = 0, 0.0, []
    for _ in range(trials):
        f = random_element(view, rng, "open")
        base = reduced_norm(f, sigma)
        lifted = reduced_norm_cylinder(phi(f, L, sigma))
        err = abs(lifted - base) / max(1.0, base)
        worst = max(worst, err)
        passed += err <= tol
        rows.append((base, lifted))
    return IsometryReport(seq.name, level, cocycle, seed, trials, passed, worst, tol, rows)


# -- support and separation -----------------------------------------------------------------------


@dataclass(frozen=True)
class SupportWitness:
    arrow: LimitArrow
    level: int
    chamber: int
    alpha: MultiIndex
    beta: MultiIndex
    value: complex

    def as_dict(self) -> dict:
        return {
            "arrow": format_arrow(self.arrow),
            "level": self.level,
            "chamber": self.chamber,
            "alpha": list(self.alpha),
            "beta": list(self.beta),
            "value": [self.value.real, self.value.imag],
        }


def support_witness(seq: CoverSequence, x: LimitArrow, L: Optional[LimitCocycle] = None) -> SupportWitness:
    """A level ``n`` and a matrix unit ``f`` at level ``n`` with ``phi_n(f)(x) != 0``."""
    ok, n = in_G(seq, x)
    if not ok:
        raise CoverError(f"{x} is not in G")
    a = project(x, n)
    i = locate(seq, n, x.t)
    f = matrix_unit(level_view(seq, n), i, a.alpha, a.beta)
    L = L if L is not None else LimitCocycle(trivial_at(seq, n))
    value = eval_cylinder(phi(f, L), x)
    if value == 0:
        raise CylinderCheckError(f"matrix unit at level {n} vanishes at {x}")
    return SupportWitness(x, n, i, a.alpha, a.beta, value)


def in_Z(seq: CoverSequence, x: LimitArrow, k: int) -> bool:
    """``x`` is in ``Y_k`` and its level-``k`` image is in ``G_k``."""
    return cylinder_support(seq, k, x) is not None


def can_separate(seq: CoverSequence, x: LimitArrow, y: LimitArrow, max_level: int) -> tuple[bool, str]:
    """Whether some ``phi_k`` image with ``k <= max_level`` tells ``x`` and ``y`` apart."""
    if x == y:
        raise ValueError("x and y must differ")
    for z in (x, y):
        if not in_G(seq, z)[0]:
            raise CoverError(f"{z} is not in G")
    for k in range(max_level + 1):
        zx, zy = in_Z(seq, x, k), in_Z(seq, y, k)
        if zx != zy:
            inside = "x" if zx else "y"
            return True, f"level {k}: only {inside} lies in the level-{k} cylinder domain"
        if zx and project(x, k) != project(y, k):
            return True, f"level {k}: the level-{k} images differ"
    return False, f"no level up to {max_level} separates {format_arrow(x)} and {format_arrow(y)}"


@dataclass(frozen=True)
class SeparationConstruction:
    seq: CoverSequence
    n: int
    t: Fraction
    x: LimitArrow
    y: LimitArrow


def separation_construction() -> SeparationConstruction:
    """Two units of G that no cylinder image separates, on ``example_A``.

    The legs agree up to level 0 where ``t = 0`` is inside ``W``, but the next
    members are ``[-1,0)`` and ``(0,1]``, which both miss ``t``.
    """
    seq = example_A()
    n, t = 0, Fraction(0)
    alpha = OmegaPoint((2,), (0,))
    beta = OmegaPoint((2,), (1,))
    assert alpha.truncate(n) == beta.truncate(n)
    assert rg.contains(w_region(seq, alpha.truncate(n)), t)
    assert not rg.contains(w_region(seq, alpha.truncate(n + 1)), t)
    assert not rg.contains(w_region(seq, beta.truncate(n + 1)), t)
    return SeparationConstruction(seq, n, t, LimitArrow(alpha, t, alpha), LimitArrow(beta, t, beta))


# -- UHF --------------------------------------------------------------------------------------------


def uhf_from_factors(factors, prefix=()) -> CoverSequence:
    return uhf(factors, prefix)


def level_dimension(seq: CoverSequence, n: int) -> int:
    """Matrix size of the level-``n`` algebra over a point space."""
    return count_multi_indices(seq, n)


def _require_point_space(seq: CoverSequence) -> None:
    if not (seq.space.discrete and seq.space.size == 1):
        raise CoverError("the UHF maps need a one-point space")


def uhf_inclusion(f: AlgebraElement) -> AlgebraElement:
    """Amplify ``f`` to level ``n + 1``: ``f`` on matching new indices, zero elsewhere."""
    _require_point_space(f.seq)
    view = level_view(f.seq, f.level + 1)
    old = f.view.chambers[0].open_position
    sig = view.chambers[0].open_signature
    src = np.array([old[a[:-1]] for a in sig], dtype=int)
    last = np.array([a[-1] for a in sig], dtype=int)
    block = f.blocks[0][np.ix_(src, src)] * (last[:, None] == last[None, :])
    return AlgebraElement(view, "open", [block])


def _point_arrows(seq: CoverSequence, n: int, rng: np.random.Generator, count: int) -> list[LimitArrow]:
    """Random arrows over the point with legs differing up to level ``n + 2``."""
    out = []
    for _ in range(count):
        depth = n + 3
        span = max(depth, seq.prefix_length)
        cycle = tuple(int(rng.integers(omega_size(seq, k))) for k in range(span, span + seq.period))
        head = tuple(int(rng.integers(omega_size(seq, k))) for k in range(depth, span))
        tail = OmegaPoint(head, cycle)
        pa = tuple(int(rng.integers(omega_size(seq, k))) for k in range(depth))
        pb = tuple(int(rng.integers(omega_size(seq, k))) for k in range(depth))
        out.append(LimitArrow(tail.with_prefix(pa), 0, tail.with_prefix(pb)))
    return out


def check_direct_limit(f: AlgebraElement, samples: int = 200, seed: int = 0, tol: float = 1e-10) -> bool:
    """``phi_{n+1}(iota f)`` and ``phi_n(f)`` agree on sampled arrows, with equal norms."""
    _require_point_space(f.seq)
    n = f.level
    g = uhf_inclusion(f)
    L = LimitCocycle(trivial_at(f.seq, n))
    cf, cg = phi(f, L), phi(g, L)
    rng = np.random.default_rng(seed)
    for x in _point_arrows(f.seq, n, rng, samples):
        if eval_cylinder(cg, x) != eval_cylinder(cf, x):
            return False
    nf = reduced_norm(f, L.at_level(n))
    ng = reduced_norm(g, L.at_level(n + 1))
    return abs(nf - ng) <= tol * max(1.0, nf)
