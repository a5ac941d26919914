"""The finite-level groupoids G_N and their closure-completions Ǧ_N.

Arrows are ``(alpha, t, beta)`` triples with explicit base point ``t``.  The
same arrow value can be tested against either groupoid; construction never
implies membership.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product

from . import region as rg
from .covers import (
    Chamber,
    CoverError,
    CoverSequence,
    MultiIndex,
    chambers,
    check_multi_index,
    greedy_index,
    locate,
    w_closure,
    w_region,
)


class NotComposable(ValueError):
    pass


@dataclass(frozen=True)
class ArrowN:
    alpha: MultiIndex
    t: Fraction
    beta: MultiIndex

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))
        object.__setattr__(self, "t", rg.as_rational(self.t))
        if len(self.alpha) != len(self.beta) or not self.alpha:
            raise CoverError("both legs of an arrow must have the same positive length")

    @property
    def level(self) -> int:
        return len(self.alpha) - 1

    def inverse(self) -> ArrowN:
        return ArrowN(self.beta, self.t, self.alpha)

    def range(self) -> ArrowN:
        return ArrowN(self.alpha, self.t, self.alpha)

    def source(self) -> ArrowN:
        return ArrowN(self.beta, self.t, self.beta)

    def is_unit(self) -> bool:
        return self.alpha == self.beta

    def __str__(self) -> str:
        return f"({self.alpha}, {rg.format_rational(self.t)}, {self.beta})"


def _check_arrow(seq: CoverSequence, a: ArrowN) -> None:
    check_multi_index(seq, a.alpha)
    check_multi_index(seq, a.beta)


def in_GN(seq: CoverSequence, a: ArrowN) -> bool:
    """``t`` lies in ``W_alpha`` and in ``W_beta``."""
    _check_arrow(seq, a)
    return rg.contains(w_region(seq, a.alpha), a.t) and rg.contains(w_region(seq, a.beta), a.t)


def in_GN_check(seq: CoverSequence, a: ArrowN) -> bool:
    """``t`` lies in the closures of ``W_alpha`` and ``W_beta``."""
    _check_arrow(seq, a)
    return rg.contains(w_closure(seq, a.alpha), a.t) and rg.contains(w_closure(seq, a.beta), a.t)


def composable(a: ArrowN, b: ArrowN) -> bool:
    return a.level == b.level and a.beta == b.alpha and a.t == b.t


def compose(a: ArrowN, b: ArrowN) -> ArrowN:
    if a.level != b.level:
        raise NotComposable("arrows live at different levels")
    if not composable(a, b):
        raise NotComposable(f"{a} and {b} are not composable")
    return ArrowN(a.alpha, a.t, b.beta)


def project_nm(a: ArrowN, n: int) -> ArrowN:
    """Truncate both legs to level ``n``."""
    if n > a.level:
        raise CoverError(f"cannot project a level-{a.level} arrow to level {n}")
    if n < 0:
        raise CoverError("levels are nonnegative")
    return ArrowN(a.alpha[: n + 1], a.t, a.beta[: n + 1])


def lift(seq: CoverSequence, a: ArrowN, m: int) -> ArrowN:
    """A preimage of ``a`` under projection to ``a.level`` living at level ``m``.

    Both legs are extended by the same greedy choice of members containing
    ``t``; when ``a`` is in Ǧ_n the result is in Ǧ_m.
    """
    if m < a.level:
        raise CoverError("lift target level must not be below the arrow's level")
    ext = tuple(greedy_index(seq, k, a.t) for k in range(a.level + 1, m + 1))
    return ArrowN(a.alpha + ext, a.t, a.beta + ext)


class LevelView:
    """Chambers of one level plus lookups used by the algebra modules."""

    def __init__(self, seq: CoverSequence, level: int):
        self.seq = seq
        self.level = level
        self.chambers: tuple[Chamber, ...] = tuple(chambers(seq, level))

    def __repr__(self) -> str:
        return f"LevelView({self.seq!r}, N={self.level}, chambers={len(self.chambers)})"

    def __len__(self) -> int:
        return len(self.chambers)

    def locate(self, t) -> int:
        return locate(self.seq, self.level, t)

    @cached_property
    def parents(self) -> tuple[tuple[int, ...], ...]:
        """For each chamber, the containing chamber index at every lower level."""
        out = []
        for ch in self.chambers:
            out.append(tuple(locate(self.seq, n, ch.sample) for n in range(self.level)))
        return tuple(out)


@lru_cache(maxsize=None)
def level_view(seq: CoverSequence, level: int) -> LevelView:
    return LevelView(seq, level)


@dataclass
class GroupoidReport:
    level: int
    chambers: list[dict]
    open_fiber_sizes: list[int]
    closure_fiber_sizes: list[int]
    arrows_checked: int
    axioms_ok: bool
    failures: list[str]

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "chamber_count": len(self.chambers),
            "chambers": self.chambers,
            "open_fiber_sizes": self.open_fiber_sizes,
            "closure_fiber_sizes": self.closure_fiber_sizes,
            "arrows_checked": self.arrows_checked,
            "axioms_ok": self.axioms_ok,
            "failures": self.failures,
        }


def groupoid_report(seq: CoverSequence, n: int, exhaustive_limit: int = 20_000, max_fiber: int = 128) -> GroupoidReport:
    """Chamber counts and a per-chamber audit of the pair-groupoid axioms.

    Associativity is checked on every composable triple when there are at
    most ``exhaustive_limit`` of them, otherwise on triples with a fixed first
    leg.
    """
    view = level_view(seq, n)
    rows = []
    failures: list[str] = []
    checked = 0
    for idx, ch in enumerate(view.chambers):
        t = ch.sample
        # very large fibers are audited on a leading slice
        A = ch.open_signature[:max_fiber]
        arrows = {(a, b): ArrowN(a, t, b) for a, b in product(A, A)}
        for (a, b), x in arrows.items():
            checked += 1
            if not in_GN(seq, x):
                failures.append(f"chamber {idx}: {x} not in G_{n}")
            if x.inverse().inverse() != x:
                failures.append(f"chamber {idx}: inverse is not an involution at {x}")
            if compose(x, x.inverse()) != x.range():
                failures.append(f"chamber {idx}: x x^-1 != r(x) at {x}")
            if compose(x.range(), x) != x or compose(x, x.source()) != x:
                failures.append(f"chamber {idx}: units fail at {x}")
        if len(A) ** 4 <= exhaustive_limit:
            quads = product(A, repeat=4)
        else:
            quads = product(A[:1], A, A[:3], A[:3])
        for a, b, c, d in quads:
            x, y, z = arrows[a, b], arrows[b, c], arrows[c, d]
            if compose(compose(x, y), z) != compose(x, compose(y, z)):
                failures.append(f"chamber {idx}: associativity fails at {x},{y},{z}")
        rows.append(
            {
                "region": str(ch.region),
                "open_signature": [list(a) for a in ch.open_signature],
                "closure_signature": [list(a) for a in ch.closure_signature],
            }
        )
    return GroupoidReport(
        level=n,
        chambers=rows,
        open_fiber_sizes=[len(ch.open_signature) for ch in view.chambers],
        closure_fiber_sizes=[len(ch.closure_signature) for ch in view.chambers],
        arrows_checked=checked,
        axioms_ok=not failures,
        failures=failures[:20],
    )
