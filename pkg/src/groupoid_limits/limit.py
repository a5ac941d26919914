"""Limit arrows ``(alpha, t, beta)`` with eventually periodic legs.

Every predicate is decided at a finite level: past the stabilization level of
both legs the regions ``W_{alpha|N}`` and their closures stop changing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import region as rg
from .covers import (
    CoverError,
    CoverSequence,
    MultiIndex,
    OmegaPoint,
    check_multi_index,
    check_omega_point,
    example_C,
    format_omega,
    greedy_index,
    last_difference,
    parse_omega,
    stabilization_level,
    stable_w_closure,
    w_region,
)
from .finite_level import ArrowN, NotComposable, in_GN
from .region import Region


@dataclass(frozen=True)
class LimitArrow:
    alpha: OmegaPoint
    t: Fraction
    beta: OmegaPoint

    def __post_init__(self):
        object.__setattr__(self, "t", rg.as_rational(self.t))

    def inverse(self) -> LimitArrow:
        return LimitArrow(self.beta, self.t, self.alpha)

    def range(self) -> LimitArrow:
        return LimitArrow(self.alpha, self.t, self.alpha)

    def source(self) -> LimitArrow:
        return LimitArrow(self.beta, self.t, self.beta)

    def is_unit(self) -> bool:
        return self.alpha == self.beta

    def __str__(self) -> str:
        return format_arrow(self)


def format_arrow(x: LimitArrow) -> str:
    return f"({format_omega(x.alpha)}, {rg.format_rational(x.t)}, {format_omega(x.beta)})"


_ARROW = re.compile(r"^\s*\(\s*([^,]*\|[^,]*?)\s*,\s*([^,]+?)\s*,\s*([^,]*\|[^,]*?)\s*\)\s*$")


def parse_arrow(text: str) -> LimitArrow:
    """Read ``"(head|cycle, t, head|cycle)"``, e.g. ``"(0|2, 0, |2)"``."""
    m = _ARROW.match(text)
    if not m:
        raise CoverError(f"cannot parse arrow literal {text!r}")
    return LimitArrow(parse_omega(m.group(1)), rg.as_rational(m.group(2)), parse_omega(m.group(3)))


# -- membership ------------------------------------------------------------------


def _check(seq: CoverSequence, x: LimitArrow) -> None:
    check_omega_point(seq, x.alpha)
    check_omega_point(seq, x.beta)


@lru_cache(maxsize=None)
def in_TR(seq: CoverSequence, x: LimitArrow) -> bool:
    """Tail-equivalent legs and ``t`` in the space."""
    _check(seq, x)
    return seq.space.contains(x.t) and last_difference(x.alpha, x.beta) is not None


def in_Xn(seq: CoverSequence, x: LimitArrow, n: int) -> bool:
    """Legs agree at every position beyond ``n``."""
    _check(seq, x)
    d = last_difference(x.alpha, x.beta)
    return d is not None and d <= n and seq.space.contains(x.t)


def in_Yn(seq: CoverSequence, x: LimitArrow, n: int) -> bool:
    return in_Xn(seq, x, n) and in_G_check_infinity(seq, x)


def _bound(seq: CoverSequence, x: LimitArrow) -> int:
    return stabilization_level(seq, x.alpha, x.beta)


@lru_cache(maxsize=None)
def in_G_infinity(seq: CoverSequence, x: LimitArrow) -> bool:
    """``t`` lies in ``W_{alpha|N}`` and ``W_{beta|N}`` for every ``N``."""
    if not in_TR(seq, x):
        return False
    B = _bound(seq, x)
    return rg.contains(w_region(seq, x.alpha.truncate(B)), x.t) and rg.contains(w_region(seq, x.beta.truncate(B)), x.t)


@lru_cache(maxsize=None)
def in_closure_G_infinity(seq: CoverSequence, x: LimitArrow) -> bool:
    """``t`` lies in the closure of ``W_{alpha|N} & W_{beta|N}`` for every ``N``."""
    if not in_TR(seq, x):
        return False
    B = _bound(seq, x)
    both = rg.intersect(w_region(seq, x.alpha.truncate(B)), w_region(seq, x.beta.truncate(B)))
    return rg.contains(rg.closure(both), x.t)


@lru_cache(maxsize=None)
def in_G_check_infinity(seq: CoverSequence, x: LimitArrow) -> bool:
    """``t`` lies in ``F_alpha & F_beta``."""
    if not in_TR(seq, x):
        return False
    return rg.contains(stable_w_closure(seq, x.alpha)[0], x.t) and rg.contains(stable_w_closure(seq, x.beta)[0], x.t)


@lru_cache(maxsize=None)
def in_G(seq: CoverSequence, x: LimitArrow) -> tuple[bool, Optional[int]]:
    """Membership in the groupoid G with the least level witness.

    A level ``n`` witnesses membership when the legs agree beyond ``n`` and
    ``t`` lies in ``W_{alpha|n} & W_{beta|n}``.  The first condition holds
    exactly for ``n >= last difference`` and the second is inherited by
    smaller ``n``, so only the least admissible ``n`` needs checking.
    """
    if not in_TR(seq, x) or not in_G_check_infinity(seq, x):
        return False, None
    n = max(last_difference(x.alpha, x.beta), 0)
    if in_GN(seq, project(x, n)):
        return True, n
    return False, None


def witness_level(seq: CoverSequence, x: LimitArrow) -> Optional[int]:
    """Least ``n`` with ``x`` in ``Y_n``, or None outside the closure groupoid."""
    if not in_G_check_infinity(seq, x):
        return None
    return max(last_difference(x.alpha, x.beta), 0)


# -- operations ---------------------------------------------------------------------


def composable_limit(x: LimitArrow, y: LimitArrow) -> bool:
    return x.beta == y.alpha and x.t == y.t


def compose_limit(x: LimitArrow, y: LimitArrow) -> LimitArrow:
    if not composable_limit(x, y):
        raise NotComposable(f"{x} and {y} are not composable")
    return LimitArrow(x.alpha, x.t, y.beta)


def inverse(x: LimitArrow) -> LimitArrow:
    return x.inverse()


def project(x: LimitArrow, N: int) -> ArrowN:
    if N < 0:
        raise CoverError("levels are nonnegative")
    return ArrowN(x.alpha.truncate(N), x.t, x.beta.truncate(N))


def factor_through_closure(seq: CoverSequence, z: LimitArrow) -> tuple[LimitArrow, LimitArrow]:
    """Write ``z`` in the closure groupoid as a product of two arrows in closure(G_inf).

    The middle leg agrees with the greedy choice of members containing ``t``
    up to the last difference of the legs and with ``alpha`` afterwards.  Its
    finite intersections are open and contain ``t``, which places both
    factors in the closure.
    """
    if not in_G_check_infinity(seq, z):
        raise CoverError(f"{z} is not in the closure groupoid")
    M = max(last_difference(z.alpha, z.beta), 0)
    prefix = tuple(greedy_index(seq, k, z.t) for k in range(M + 1))
    gamma = z.alpha.replace_prefix(prefix)
    return LimitArrow(z.alpha, z.t, gamma), LimitArrow(gamma, z.t, z.beta)


# -- basic sets ------------------------------------------------------------------------


@dataclass(frozen=True)
class BasicSet:
    """Arrows with legs extending ``alpha``/``beta``, equal tails beyond ``n`` and ``t`` in ``U``."""

    n: int
    alpha: MultiIndex
    beta: MultiIndex
    U: Region

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))
        if len(self.alpha) != self.n + 1 or len(self.beta) != self.n + 1:
            raise CoverError("basic set legs must have length n + 1")

    def contains(self, seq: CoverSequence, x: LimitArrow) -> bool:
        return (
            x.alpha.truncate(self.n) == self.alpha
            and x.beta.truncate(self.n) == self.beta
            and in_Xn(seq, x, self.n)
            and rg.contains(self.U, x.t)
            and in_G_check_infinity(seq, x)
        )


@dataclass(frozen=True)
class BasicRange:
    gamma: OmegaPoint
    delta: OmegaPoint
    region: Region
    fiber: Region


def basic_range(seq: CoverSequence, B: BasicSet, tail: Optional[OmegaPoint] = None) -> BasicRange:
    """Range of the slice of ``B`` whose common tail (positions ``> n``) is ``tail``.

    The range is ``U & F_gamma & F_delta`` where ``gamma`` and ``delta`` are the
    two legs; ``fiber`` is ``F_gamma``, the unit fiber that the range is
    compared against.  ``tail`` defaults to the constant index 0.
    """
    check_multi_index(seq, B.alpha)
    check_multi_index(seq, B.beta)
    if not rg.is_open(B.U):
        raise CoverError(f"U = {B.U} is not open")
    tau = tail if tail is not None else OmegaPoint.constant(0)
    gamma = tau.with_prefix(B.alpha)
    delta = tau.with_prefix(B.beta)
    F_gamma = stable_w_closure(seq, gamma)[0]
    F_delta = stable_w_closure(seq, delta)[0]
    R = rg.intersect(B.U, rg.intersect(F_gamma, F_delta))
    if R.is_empty():
        raise CoverError("the basic set has no arrows with this tail")
    return BasicRange(gamma, delta, R, F_gamma)


def basic_range_is_open(seq: CoverSequence, B: BasicSet, tail: Optional[OmegaPoint] = None) -> bool:
    """Whether the range slice is open in the unit fiber ``F_gamma``.

    ``False`` shows the range map is not open on ``B``.
    """
    r = basic_range(seq, B, tail)
    return rg.is_open_in(r.region, r.fiber)


def g_unit_neighborhood(seq: CoverSequence, x: LimitArrow) -> BasicSet:
    """A basic neighbourhood of a unit of G consisting of units of G."""
    if not x.is_unit() or not in_G(seq, x)[0]:
        raise CoverError(f"{x} is not a unit of G")
    a0 = x.alpha.truncate(0)
    return BasicSet(0, a0, a0, w_region(seq, a0))


# -- local compactness failure ---------------------------------------------------------------


def script_local_compactness_failure(seq: CoverSequence, n: int = 1, ks=range(3, 11)) -> dict:
    """Membership facts behind the sequence ``x_k = (0^n 1bar, 1/2 + 1/k, 0^n 1bar)``."""
    if seq != example_C():
        raise CoverError("the local compactness script runs on example_C only")
    leg = OmegaPoint((0,) * n, (1,))
    members = {}
    for k in ks:
        x_k = LimitArrow(leg, Fraction(1, 2) + Fraction(1, k), leg)
        members[k] = in_G_infinity(seq, x_k)
    limit = LimitArrow(leg, Fraction(1, 2), leg)
    hat = LimitArrow(OmegaPoint.constant(0), Fraction(1, 2), OmegaPoint.constant(0))
    report = {
        "n": n,
        "sequence": {str(k): v for k, v in members.items()},
        "all_in_G_infinity": all(members.values()),
        "limit": format_arrow(limit),
        "limit_in_G_check_infinity": in_G_check_infinity(seq, limit),
        "limit_in_G_infinity": in_G_infinity(seq, limit),
        "constant_zero_in_G_infinity": in_G_infinity(seq, hat),
    }
    report["ok"] = (
        report["all_in_G_infinity"]
        and report["limit_in_G_check_infinity"]
        and not report["limit_in_G_infinity"]
        and report["constant_zero_in_G_infinity"]
    )
    return report
