"""Exact model of the compact base space and its open/closed subsets.

A space is a finite union of disjoint closed rational intervals. A finite
discrete space of ``size`` points is the special case whose components are the
degenerate intervals ``[i, i]``; every subset of it is open and closed.

Regions are finite unions of rational intervals kept in a canonical form
(sorted, maximal, nonempty pieces), so two regions are equal as point sets
exactly when they compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

Number = Union[int, Fraction, str]


def as_rational(value: Number) -> Fraction:
    """Parse ``"p/q"``, an integer string, an int or a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class RegionError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed)
        return False

    def contains(self, t: Fraction) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    def __str__(self) -> str:
        if self.lo == self.hi:
            return "{" + format_rational(self.lo) + "}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_rational(self.lo)},{format_rational(self.hi)}{right}"


@dataclass(frozen=True)
class Space:
    """Disjoint sorted closed intervals ``[a_i, b_i]``.

    ``discrete`` marks the finite point space; points are then the indices
    ``0..size-1``.
    """

    components: tuple[tuple[Fraction, Fraction], ...]
    discrete: bool = False

    def __post_init__(self):
        if not self.components:
            raise RegionError("a space needs at least one component")
        prev = None
        for a, b in self.components:
            if a > b:
                raise RegionError(f"component [{a},{b}] has lo > hi")
            if prev is not None and a <= prev:
                raise RegionError("space components must be disjoint and sorted")
            prev = b

    @property
    def size(self) -> int:
        return len(self.components)

    def whole(self) -> Region:
        return Region(self, tuple(Interval(a, b) for a, b in self.components))

    def empty(self) -> Region:
        return Region(self, ())

    def contains(self, t: Number) -> bool:
        t = as_rational(t)
        return any(a <= t <= b for a, b in self.components)

    def __str__(self) -> str:
        if self.discrete:
            return f"FiniteSpace({self.size})"
        return " u ".join(f"[{format_rational(a)},{format_rational(b)}]" for a, b in self.components)


def IntervalSpace(*components) -> Space:
    """``IntervalSpace((-1, 1))`` or ``IntervalSpace((0, 1), (2, 3))``."""
    return Space(tuple((as_rational(a), as_rational(b)) for a, b in components))


def FiniteSpace(size: int) -> Space:
    if size < 1:
        raise RegionError("a finite space has at least one point")
    return Space(tuple((Fraction(i), Fraction(i)) for i in range(size)), discrete=True)


@dataclass(frozen=True)
class Region:
    space: Space
    intervals: tuple[Interval, ...]

    def is_empty(self) -> bool:
        return not self.intervals

    def __contains__(self, t) -> bool:
        return contains(self, t)

    def points(self) -> list[int]:
        """Indices of a region in a finite space."""
        if not self.space.discrete:
            raise RegionError("points() only applies to finite spaces")
        return [int(iv.lo) for iv in self.intervals]

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        if self.space.discrete:
            return "{" + ",".join(format_rational(iv.lo) for iv in self.intervals) + "}"
        return " u ".join(str(iv) for iv in self.intervals)


def _check_same_space(*regions: Region) -> Space:
    space = regions[0].space
    for r in regions[1:]:
        if r.space != space:
            raise RegionError("regions live in different spaces")
    return space


def _critical_points(space: Space, regions: Iterable[Region]) -> list[Fraction]:
    pts = set()
    for a, b in space.components:
        pts.add(a)
        pts.add(b)
    for r in regions:
        for iv in r.intervals:
            pts.add(iv.lo)
            pts.add(iv.hi)
    return sorted(pts)


def _cells(space: Space, regions: Sequence[Region]):
    """Yield ``(kind, lo, hi, probe)`` for the cells inside the space.

    Every region has constant membership on each cell because all of their
    endpoints are cell boundaries.  Cells come in left-to-right order.
    """
    pts = _critical_points(space, regions)
    for i, p in enumerate(pts):
        if space.contains(p):
            yield ("pt", p, p, p)
        if i + 1 < len(pts):
            q = pts[i + 1]
            mid = (p + q) / 2
            if space.contains(mid):
                yield ("gap", p, q, mid)


def _from_cells(space: Space, cells) -> Region:
    """Rebuild a canonical region from included cells in left-to-right order.

    ``cells`` is an iterable of ``(kind, lo, hi, included)`` covering the
    space; maximal runs of consecutive included cells become intervals.
    """
    out: list[Interval] = []
    run_start = None
    last = None
    for kind, lo, hi, included in cells:
        if included:
            if run_start is None:
                run_start = (lo, kind == "pt")
            last = (hi, kind == "pt")
        elif run_start is not None:
            out.append(Interval(run_start[0], last[0], run_start[1], last[1]))
            run_start = None
    if run_start is not None:
        out.append(Interval(run_start[0], last[0], run_start[1], last[1]))
    return Region(space, tuple(out))


def combine(regions: Sequence[Region], rule: Callable[[tuple[bool, ...]], bool], space: Space | None = None) -> Region:
    """Region of points whose membership vector across ``regions`` satisfies ``rule``."""
    if space is None:
        space = _check_same_space(*regions)
    cells = []
    prev_end = None
    for kind, lo, hi, probe in _cells(space, regions):
        # a run may only continue across adjacent cells
        if prev_end is not None and prev_end != lo:
            cells.append(("gap", prev_end, lo, False))
        included = rule(tuple(contains(r, probe) for r in regions))
        cells.append((kind, lo, hi, included))
        prev_end = hi
    return _from_cells(space, cells)


def _coerce_interval(raw) -> Interval:
    if isinstance(raw, Interval):
        return raw
    if isinstance(raw, dict):
        return Interval(
            as_rational(raw["lo"]),
            as_rational(raw["hi"]),
            bool(raw.get("lo_closed", True)),
            bool(raw.get("hi_closed", True)),
        )
    lo, hi, *flags = raw
    lo_closed = flags[0] if len(flags) > 0 else True
    hi_closed = flags[1] if len(flags) > 1 else True
    return Interval(as_rational(lo), as_rational(hi), bool(lo_closed), bool(hi_closed))


def normalize(space: Space, raw_intervals: Iterable) -> Region:
    """Canonical region equal to the union of ``raw_intervals``.

    Items may be :class:`Interval`, ``(lo, hi[, lo_closed, hi_closed])`` tuples
    or ``{"lo", "hi", "lo_closed", "hi_closed"}`` records.

    >>> T = IntervalSpace((0, 1))
    >>> str(normalize(T, [(0, "1/2", True, False), ("1/2", 1)]))
    '[0,1]'
    """
    pieces = []
    for raw in raw_intervals:
        iv = _coerce_interval(raw)
        if iv.lo > iv.hi:
            raise RegionError(f"interval {iv} has lo > hi")
        if iv.is_empty():
            continue
        # a nonempty interval lies in the space iff it lies in one component
        if not any(a <= iv.lo and iv.hi <= b for a, b in space.components):
            raise RegionError(f"interval {iv} leaves the space {space}")
        pieces.append(Region(space, (iv,)))
    if not pieces:
        return space.empty()
    return combine(pieces, any, space)


def region(space: Space, *raw) -> Region:
    """Shorthand: ``region(T, (-1, 0, True, False))``."""
    return normalize(space, raw)


def points_region(space: Space, indices: Iterable[int]) -> Region:
    """Region of a finite space given by point indices."""
    return normalize(space, [(i, i) for i in indices])


def contains(r: Region, t) -> bool:
    t = as_rational(t)
    for iv in r.intervals:
        if t < iv.lo:
            return False
        if iv.contains(t):
            return True
    return False


def intersect(a: Region, b: Region) -> Region:
    return combine([a, b], all)


def union(a: Region, b: Region) -> Region:
    return combine([a, b], any)


def subtract(a: Region, b: Region) -> Region:
    return combine([a, b], lambda m: m[0] and not m[1])


def complement(r: Region) -> Region:
    return subtract(r.space.whole(), r)


def is_empty(r: Region) -> bool:
    return r.is_empty()


def is_subset(a: Region, b: Region) -> bool:
    return subtract(a, b).is_empty()


def closure(r: Region) -> Region:
    """Topological closure; the space itself is closed in the line."""
    closed = [Region(r.space, (Interval(iv.lo, iv.hi, True, True),)) for iv in r.intervals]
    if not closed:
        return r
    return combine(closed, any, r.space)


def interior(r: Region) -> Region:
    """Largest subset of ``r`` open in the space."""
    return complement(closure(complement(r)))


def is_open_in(r: Region, ambient: Region) -> bool:
    """Whether ``r`` is open in the subspace topology of ``ambient``.

    Equivalent to ``r`` not meeting the closure of ``ambient \\ r``.
    """
    _check_same_space(r, ambient)
    if not is_subset(r, ambient):
        raise RegionError("is_open_in requires r to lie inside the ambient region")
    return intersect(r, closure(subtract(ambient, r))).is_empty()


def is_open(r: Region) -> bool:
    return is_open_in(r, r.space.whole())


def sample_points(r: Region) -> list[Fraction]:
    """One representative per maximal piece: the midpoint, or the point itself."""
    return [iv.lo if iv.lo == iv.hi else (iv.lo + iv.hi) / 2 for iv in r.intervals]
