"""Seeded random limit arrows for property checks."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from . import region as rg
from .covers import CoverSequence, OmegaPoint, chambers, greedy_sequence, omega_size
from .limit import LimitArrow, in_G, in_G_check_infinity


def interesting_points(seq: CoverSequence, levels: int = 2) -> list[Fraction]:
    """Chamber endpoints and representatives up to ``levels``, sorted."""
    pts: set[Fraction] = set()
    for n in range(levels + 1):
        for ch in chambers(seq, n):
            for iv in ch.region.intervals:
                pts.update((iv.lo, iv.hi))
            pts.add(ch.sample)
    return sorted(pts)


def random_point(seq: CoverSequence, rng: np.random.Generator, pool: list[Fraction]) -> Fraction:
    if seq.space.discrete or rng.random() < 0.7:
        return pool[int(rng.integers(len(pool)))]
    a, b = seq.space.components[int(rng.integers(seq.space.size))]
    return a + (b - a) * Fraction(int(rng.integers(0, 65)), 64)


def _pick(seq: CoverSequence, rng: np.random.Generator, k: int, t, bias: float) -> int:
    """An index at level ``k``; with probability ``bias`` one whose member closure contains ``t``."""
    size = omega_size(seq, k)
    if rng.random() < bias:
        near = [i for i, m in enumerate(seq.cover(k)) if rg.contains(rg.closure(m), t)]
        if near:
            return near[int(rng.integers(len(near)))]
    return int(rng.integers(size))


def random_omega_point(seq: CoverSequence, rng: np.random.Generator, t=None, bias: float = 0.0) -> OmegaPoint:
    # head covers the prefix so cycle positions see periodic covers
    head_len = seq.prefix_length + int(rng.integers(0, 3))
    q = seq.period * int(rng.integers(1, 3))
    t = t if t is not None else seq.space.components[0][0]
    head = tuple(_pick(seq, rng, k, t, bias) for k in range(head_len))
    cycle = tuple(_pick(seq, rng, k, t, bias) for k in range(head_len, head_len + q))
    return OmegaPoint(head, cycle)


def random_arrow(seq: CoverSequence, rng: np.random.Generator, pool: list[Fraction] | None = None, bias: float = 0.8) -> LimitArrow:
    """A random arrow; most have tail-equivalent legs differing in a short prefix."""
    pool = pool if pool is not None else interesting_points(seq)
    t = random_point(seq, rng, pool)
    alpha = random_omega_point(seq, rng, t, bias)
    if rng.random() < 0.25:
        # tails through members containing t reach the edges of the closure groupoid
        head = tuple(_pick(seq, rng, k, t, bias) for k in range(int(rng.integers(0, 3))))
        alpha = greedy_sequence(seq, t, len(head)).with_prefix(head)
    if rng.random() < 0.15:
        return LimitArrow(alpha, t, random_omega_point(seq, rng, t, bias))
    depth = int(rng.integers(0, 4))
    prefix = tuple(_pick(seq, rng, k, t, bias) for k in range(depth))
    return LimitArrow(alpha, t, alpha.replace_prefix(prefix))


def sample_where(
    seq: CoverSequence,
    rng: np.random.Generator,
    predicate: Callable[[CoverSequence, LimitArrow], bool],
    count: int,
    max_tries: int = 200_000,
) -> list[LimitArrow]:
    pool = interesting_points(seq)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"found only {len(out)} of {count} samples in {max_tries} tries")
        x = random_arrow(seq, rng, pool, bias=0.95)
        if predicate(seq, x):
            out.append(x)
    return out


def sample_G(seq: CoverSequence, rng: np.random.Generator, count: int) -> list[LimitArrow]:
    return sample_where(seq, rng, lambda s, x: in_G(s, x)[0], count)


def sample_G_check(seq: CoverSequence, rng: np.random.Generator, count: int) -> list[LimitArrow]:
    return sample_where(seq, rng, in_G_check_infinity, count)
