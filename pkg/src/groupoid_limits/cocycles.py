"""Normalized 2-cocycles on Ǧ_N stored chamber by chamber.

For a chamber ``c`` the table ``sigma_c[a, b, g]`` is the value on the pair
``((a, t, b), (b, t, g))`` for any ``t`` in ``c``; indices run over the
closure signature, so every stored cocycle on G_N comes with its extension to
Ǧ_N.

Exact tables hold integer numerators ``k`` of turns ``k / denominator``
(the value is ``exp(2 pi i k / denominator)``).  Float tables hold complex
values of modulus one up to ``MODULUS_TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import region as rg
from .covers import CapExceeded, MultiIndex
from .finite_level import ArrowN, LevelView, composable, level_view
from .region import Region

MODULUS_TOL = 1e-12
MAX_VERIFY_ENTRIES = 50_000_000


class CocycleError(ValueError):
    pass


def _phases(table: np.ndarray, denominator: int | None) -> np.ndarray:
    if denominator is None:
        return np.asarray(table, dtype=complex)
    turns = np.mod(table, denominator).astype(float) / denominator
    out = np.exp(2j * np.pi * turns)
    # snap the quarter turns so that +-1, +-i are exact
    quarter = (4 * np.mod(table, denominator)) % denominator == 0
    if quarter.any():
        k = (4 * np.mod(table, denominator) // denominator)[quarter]
        out[quarter] = np.array([1, 1j, -1, -1j])[k % 4]
    return out


class CocycleData:
    """A normalized cocycle table per chamber of one level."""

    def __init__(self, view: LevelView, tables: Sequence[np.ndarray], denominator: int | None = 1, check: bool = True):
        if len(tables) != len(view.chambers):
            raise CocycleError(f"expected {len(view.chambers)} chamber tables, got {len(tables)}")
        self.view = view
        self.denominator = denominator
        clean = []
        for ch, tab in zip(view.chambers, tables):
            k = len(ch.closure_signature)
            if denominator is None:
                tab = np.asarray(tab, dtype=complex)
            else:
                tab = np.mod(np.asarray(tab, dtype=np.int64), denominator)
            if tab.shape != (k, k, k):
                raise CocycleError(f"table shape {tab.shape} does not match closure signature size {k}")
            clean.append(tab)
        self.tables = tuple(clean)
        self._phase_cache: dict = {}
        if check:
            self._check_values()

    @property
    def level(self) -> int:
        return self.view.level

    @property
    def seq(self):
        return self.view.seq

    @property
    def exact(self) -> bool:
        return self.denominator is not None

    def __repr__(self) -> str:
        kind = f"exact/{self.denominator}" if self.exact else "float"
        return f"CocycleData(level={self.level}, chambers={len(self.tables)}, {kind})"

    def _check_values(self) -> None:
        for i, tab in enumerate(self.tables):
            k = tab.shape[0]
            if k == 0:
                continue
            diag_left = tab[np.arange(k), np.arange(k), :]
            diag_right = tab[:, np.arange(k), np.arange(k)]
            if self.exact:
                if np.any(diag_left % self.denominator) or np.any(diag_right % self.denominator):
                    raise CocycleError(f"chamber {i}: cocycle is not normalized on units")
            else:
                if np.any(np.abs(np.abs(tab) - 1) > MODULUS_TOL):
                    raise CocycleError(f"chamber {i}: entries are not of modulus one")
                if np.any(np.abs(diag_left - 1) > MODULUS_TOL) or np.any(np.abs(diag_right - 1) > MODULUS_TOL):
                    raise CocycleError(f"chamber {i}: cocycle is not normalized on units")

    def phases(self, i: int, domain: str = "closed") -> np.ndarray:
        """Complex table for chamber ``i`` on the closure (or open) signature."""
        key = (i, domain)
        if key not in self._phase_cache:
            full = _phases(self.tables[i], self.denominator)
            if domain == "open":
                pos = np.array(self.view.chambers[i].open_in_closure, dtype=int)
                full = full[np.ix_(pos, pos, pos)]
            self._phase_cache[key] = full
        return self._phase_cache[key]

    def value(self, i: int, a: MultiIndex, b: MultiIndex, g: MultiIndex) -> complex:
        pos = self.view.chambers[i].closure_position
        try:
            ia, ib, ig = pos[a], pos[b], pos[g]
        except KeyError as exc:
            raise CocycleError(f"{exc.args[0]} is not in the closure signature of chamber {i}") from None
        return complex(self.phases(i)[ia, ib, ig])

    def turns(self, i: int) -> np.ndarray:
        """Exact turns as Fractions (exact storage only)."""
        if not self.exact:
            raise CocycleError("float cocycles carry no exact turns")
        tab = self.tables[i]
        out = np.empty(tab.shape, dtype=object)
        for idx, k in np.ndenumerate(tab):
            out[idx] = Fraction(int(k), self.denominator)
        return out

    def same_as(self, other: CocycleData, tol: float = MODULUS_TOL) -> bool:
        if self.view is not other.view and (self.seq != other.seq or self.level != other.level):
            return False
        for i in range(len(self.tables)):
            if self.exact and other.exact:
                D = math.lcm(self.denominator, other.denominator)
                a = self.tables[i] * (D // self.denominator) % D
                b = other.tables[i] * (D // other.denominator) % D
                if not np.array_equal(a, b):
                    return False
            elif not np.allclose(self.phases(i), other.phases(i), atol=tol, rtol=0):
                return False
        return True


@dataclass
class CoboundaryGenerator:
    """Per-chamber ``mu_c[a, b]`` on the closure signature, ``mu_c[a, a] = 1``."""

    view: LevelView
    tables: tuple
    denominator: int | None = 1

    def __post_init__(self):
        clean = []
        for i, (ch, tab) in enumerate(zip(self.view.chambers, self.tables)):
            k = len(ch.closure_signature)
            tab = np.asarray(tab, dtype=complex) if self.denominator is None else np.mod(np.asarray(tab, dtype=np.int64), self.denominator)
            if tab.shape != (k, k):
                raise CocycleError(f"generator table shape {tab.shape} does not match signature size {k}")
            diag = np.diagonal(tab)
            if self.denominator is None:
                if np.any(np.abs(np.abs(tab) - 1) > MODULUS_TOL) or np.any(np.abs(diag - 1) > MODULUS_TOL):
                    raise CocycleError(f"chamber {i}: generator must have modulus one and unit diagonal")
            elif np.any(diag % self.denominator):
                raise CocycleError(f"chamber {i}: generator diagonal must be trivial")
            clean.append(tab)
        self.tables = tuple(clean)

    def phases(self, i: int) -> np.ndarray:
        return _phases(self.tables[i], self.denominator)


@dataclass
class Violation:
    chamber: int
    quadruple: tuple[MultiIndex, MultiIndex, MultiIndex, MultiIndex]
    residual: float

    def __str__(self) -> str:
        a, b, c, d = self.quadruple
        return f"chamber {self.chamber}: identity fails at {a},{b},{c},{d} (residual {self.residual:.3g})"


def trivial(view: LevelView) -> CocycleData:
    return CocycleData(view, [np.zeros((len(ch.closure_signature),) * 3, dtype=np.int64) for ch in view.chambers], 1)


def trivial_at(seq, level: int) -> CocycleData:
    return trivial(level_view(seq, level))


def verify_cocycle(d: CocycleData, tol: float = MODULUS_TOL, limit: int | None = None) -> list[Violation]:
    """All quadruples violating ``s[a,c,d] s[a,b,c] = s[b,c,d] s[a,b,d]``.

    Exact tables are checked modulo the denominator; float tables within
    ``tol``.  An empty list means ``d`` is a cocycle.
    """
    out: list[Violation] = []
    for i, tab in enumerate(d.tables):
        k = tab.shape[0]
        if k == 0:
            continue
        if k**4 > MAX_VERIFY_ENTRIES:
            raise CapExceeded(f"chamber {i}: {k}^4 quadruples exceed the verification cap")
        if d.exact:
            D = d.denominator
            lhs = tab[:, None, :, :] + tab[:, :, :, None]
            rhs = tab[None, :, :, :] + tab[:, :, None, :]
            bad = (lhs - rhs) % D != 0
            residual = np.abs(np.exp(2j * np.pi * ((lhs - rhs) % D) / D) - 1)
        else:
            lhs = tab[:, None, :, :] * tab[:, :, :, None]
            rhs = tab[None, :, :, :] * tab[:, :, None, :]
            residual = np.abs(lhs - rhs)
            bad = residual > tol
        sig = d.view.chambers[i].closure_signature
        for a, b, c, e in zip(*np.nonzero(bad)):
            out.append(Violation(i, (sig[a], sig[b], sig[c], sig[e]), float(residual[a, b, c, e])))
            if limit is not None and len(out) >= limit:
                return out
    return out


def coboundary_from(mu: CoboundaryGenerator) -> CocycleData:
    """``sigma[a,b,g] = mu[a,b] mu[b,g] conj(mu[a,g])``."""
    tables = []
    for tab in mu.tables:
        if mu.denominator is None:
            tables.append(tab[:, :, None] * tab[None, :, :] * np.conj(tab)[:, None, :])
        else:
            tables.append(tab[:, :, None] + tab[None, :, :] - tab[:, None, :])
    return CocycleData(mu.view, tables, mu.denominator)


def is_coboundary(d: CocycleData) -> CoboundaryGenerator:
    """A generator ``mu`` with ``coboundary_from(mu) == d``.

    Each chamber carries a full pair groupoid, so fixing the first signature
    element ``a0`` and setting ``mu[a, b] = sigma[a0, a, b]`` always works for a
    genuine cocycle; the result is re-verified.
    """
    bad = verify_cocycle(d, limit=1)
    if bad:
        raise CocycleError(f"not a cocycle: {bad[0]}")
    tables = [tab[0] if tab.shape[0] else tab.reshape(0, 0) for tab in d.tables]
    mu = CoboundaryGenerator(d.view, tuple(tables), d.denominator)
    if not coboundary_from(mu).same_as(d):
        raise CocycleError("trivialization failed to reproduce the cocycle")
    return mu


def random_generator(view: LevelView, seed: int, denominator: int = 12) -> CoboundaryGenerator:
    """Seeded exact generator with entries ``k / denominator`` turns off the diagonal."""
    rng = np.random.default_rng(seed)
    tables = []
    for ch in view.chambers:
        k = len(ch.closure_signature)
        tab = rng.integers(0, denominator, size=(k, k))
        np.fill_diagonal(tab, 0)
        tables.append(tab)
    return CoboundaryGenerator(view, tuple(tables), denominator)


def random_coboundary(view: LevelView, seed: int, denominator: int = 12) -> CocycleData:
    return coboundary_from(random_generator(view, seed, denominator))


def product(d1: CocycleData, d2: CocycleData) -> CocycleData:
    """Pointwise product."""
    if d1.seq != d2.seq or d1.level != d2.level:
        raise CocycleError("cocycles live on different groupoids")
    if d1.exact and d2.exact:
        D = math.lcm(d1.denominator, d2.denominator)
        tabs = [a * (D // d1.denominator) + b * (D // d2.denominator) for a, b in zip(d1.tables, d2.tables)]
        return CocycleData(d1.view, tabs, D)
    return CocycleData(d1.view, [d1.phases(i) * d2.phases(i) for i in range(len(d1.tables))], None)


def inverse(d: CocycleData) -> CocycleData:
    if d.exact:
        return CocycleData(d.view, [-t for t in d.tables], d.denominator)
    return CocycleData(d.view, [np.conj(t) for t in d.tables], None)


def to_float(d: CocycleData) -> CocycleData:
    return CocycleData(d.view, [d.phases(i) for i in range(len(d.tables))], None)


def _containing_chamber(view_n: LevelView, region: Region) -> int:
    t = rg.sample_points(region)[0]
    i = view_n.locate(t)
    if not rg.is_subset(region, view_n.chambers[i].region):
        raise CocycleError("finer chamber is not contained in a coarser one")
    return i


def pullback(d: CocycleData, m: int) -> CocycleData:
    """Pull ``d`` back along the truncation from level ``m`` to ``d.level``."""
    n = d.level
    if m < n:
        raise CocycleError("pullback goes to a level at or above the cocycle's")
    if m == n:
        return d
    view_m = level_view(d.seq, m)
    tables = []
    for ch in view_m.chambers:
        i = _containing_chamber(d.view, ch.region)
        parent = d.view.chambers[i]
        try:
            idx = np.array([parent.closure_position[a[: n + 1]] for a in ch.closure_signature], dtype=int)
        except KeyError as exc:
            raise CocycleError(f"truncated index {exc.args[0]} missing from the coarser closure signature") from None
        tables.append(d.tables[i][np.ix_(idx, idx, idx)] if len(idx) else d.tables[i][:0, :0, :0])
    return CocycleData(view_m, tables, d.denominator)


def cocycle_value(d: CocycleData, x: ArrowN, y: ArrowN) -> complex:
    """Value on a composable pair of arrows at the cocycle's level."""
    if not composable(x, y):
        raise CocycleError(f"{x} and {y} are not composable")
    if x.level != d.level:
        raise CocycleError("arrows and cocycle live at different levels")
    i = d.view.locate(x.t)
    return d.value(i, x.alpha, x.beta, y.beta)


def boundary_audit(d: CocycleData, tol: float = MODULUS_TOL) -> list[int]:
    """Degenerate chambers whose tables agree with no adjacent chamber.

    For a one-point chamber and a neighbouring chamber whose closure contains
    it, the tables are compared on the neighbour's closure signature; the
    chamber is flagged when no neighbour matches.
    """
    flagged = []
    chs = d.view.chambers
    for i, ch in enumerate(chs):
        ivs = ch.region.intervals
        if len(ivs) != 1 or ivs[0].lo != ivs[0].hi:
            continue
        p = ivs[0].lo
        matched = False
        neighbours = 0
        for j, other in enumerate(chs):
            if j == i or not rg.contains(rg.closure(other.region), p):
                continue
            if not set(other.closure_signature) <= set(ch.closure_signature):
                continue
            neighbours += 1
            idx = np.array([ch.closure_position[a] for a in other.closure_signature], dtype=int)
            mine = d.phases(i)[np.ix_(idx, idx, idx)]
            if np.allclose(mine, d.phases(j), atol=tol, rtol=0):
                matched = True
                break
        if neighbours and not matched:
            flagged.append(i)
    return flagged


@dataclass
class LimitCocycle:
    """Cocycle on the limit groupoid obtained by pulling back a level-``n0`` table."""

    data: CocycleData
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def base_level(self) -> int:
        return self.data.level

    @property
    def seq(self):
        return self.data.seq

    def at_level(self, m: int) -> CocycleData:
        """The compatible cocycle at level ``m >= base_level``."""
        if m not in self._cache:
            self._cache[m] = pullback(self.data, m)
        return self._cache[m]


def limit_eval(L: LimitCocycle, x, y) -> complex:
    """``sigma(x, y)`` for composable limit arrows, via their level-``n0`` images."""
    from .limit import composable_limit, in_G_check_infinity, project

    if not composable_limit(x, y):
        raise CocycleError("limit arrows are not composable")
    for arrow in (x, y):
        if not in_G_check_infinity(L.seq, arrow):
            raise CocycleError(f"{arrow} is outside the closure groupoid")
    n0 = L.base_level
    return cocycle_value(L.data, project(x, n0), project(y, n0))
