"""Ordered cover refinements, admissible index sequences and chambers.

A :class:`CoverSequence` lists the open covers ``V^(0), V^(1), ...`` of the
base space: an explicit prefix followed by a periodic tail.  Multi-indices
``(a_0, ..., a_n)`` are plain tuples; infinite index sequences are
:class:`OmegaPoint` values in eventually-periodic normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterator, Sequence

from . import region as rg
from .region import Region, Space

MultiIndex = tuple  # tuple[int, ...]

DEFAULT_MAX_INDICES = 200_000


class CoverError(ValueError):
    pass


class CapExceeded(RuntimeError):
    """An enumeration would exceed the configured size cap."""


Cover = tuple  # tuple[Region, ...]


@dataclass(frozen=True, eq=False)
class CoverSequence:
    space: Space
    prefix: tuple[Cover, ...]
    cycle: tuple[Cover, ...]
    name: str | None = None

    def __post_init__(self):
        if not self.cycle:
            raise CoverError("the periodic tail needs at least one cover")
        for cov in self.prefix + self.cycle:
            if not cov:
                raise CoverError("covers must have at least one member")
            for member in cov:
                if member.space != self.space:
                    raise CoverError("cover member lives in a different space")

    @cached_property
    def _key(self):
        return (self.space, self.prefix, self.cycle)

    @cached_property
    def _hash(self) -> int:
        return hash(self._key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, CoverSequence) and self._key == other._key

    def __repr__(self) -> str:
        label = self.name or "custom"
        return f"CoverSequence({label}, prefix={len(self.prefix)}, period={self.period})"

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def prefix_length(self) -> int:
        return len(self.prefix)

    def cover(self, k: int) -> Cover:
        if k < 0:
            raise CoverError("levels are nonnegative")
        if k < len(self.prefix):
            return self.prefix[k]
        return self.cycle[(k - len(self.prefix)) % len(self.cycle)]

    def member(self, k: int, i: int) -> Region:
        cov = self.cover(k)
        if not 0 <= i < len(cov):
            raise CoverError(f"index {i} is not valid at level {k} (cover has {len(cov)} members)")
        return cov[i]


@dataclass(frozen=True)
class CoverIssue:
    level: int
    kind: str  # "gap" | "not-open"
    region: Region
    member: int | None = None

    def __str__(self) -> str:
        if self.kind == "gap":
            return f"level {self.level}: cover misses {self.region}"
        return f"level {self.level}: member {self.member} = {self.region} is not open"


def validate(seq: CoverSequence) -> list[CoverIssue]:
    """Problems with the sequence; an empty list means every level is an open cover."""
    issues = []
    whole = seq.space.whole()
    for k in range(len(seq.prefix) + len(seq.cycle)):
        cov = seq.cover(k)
        covered = seq.space.empty()
        for i, member in enumerate(cov):
            if not rg.is_open(member):
                issues.append(CoverIssue(k, "not-open", member, i))
            covered = rg.union(covered, member)
        gap = rg.subtract(whole, covered)
        if not gap.is_empty():
            issues.append(CoverIssue(k, "gap", gap))
    return issues


def check(seq: CoverSequence) -> CoverSequence:
    issues = validate(seq)
    if issues:
        raise CoverError("; ".join(str(i) for i in issues))
    return seq


def omega_size(seq: CoverSequence, k: int) -> int:
    return len(seq.cover(k))


def check_multi_index(seq: CoverSequence, alpha: Sequence[int]) -> None:
    if not alpha:
        raise CoverError("multi-indices have at least one entry")
    for k, a in enumerate(alpha):
        if not 0 <= a < omega_size(seq, k):
            raise CoverError(f"index {a} is not valid at level {k}")


@lru_cache(maxsize=None)
def _w_region(seq: CoverSequence, alpha: MultiIndex) -> Region:
    if len(alpha) == 1:
        return seq.member(0, alpha[0])
    head = _w_region(seq, alpha[:-1])
    if head.is_empty():
        return head
    return rg.intersect(head, seq.member(len(alpha) - 1, alpha[-1]))


def w_region(seq: CoverSequence, alpha: Sequence[int]) -> Region:
    """``W_alpha``: intersection of the chosen members through level ``len(alpha)-1``."""
    alpha = tuple(alpha)
    check_multi_index(seq, alpha)
    return _w_region(seq, alpha)


@lru_cache(maxsize=None)
def w_closure(seq: CoverSequence, alpha: MultiIndex) -> Region:
    return rg.closure(w_region(seq, alpha))


def iter_multi_indices(seq: CoverSequence, n: int) -> Iterator[MultiIndex]:
    """All of ``Omega^(n)`` in lexicographic order."""
    return product(*(range(omega_size(seq, k)) for k in range(n + 1)))


def count_multi_indices(seq: CoverSequence, n: int) -> int:
    return math.prod(omega_size(seq, k) for k in range(n + 1))


@lru_cache(maxsize=None)
def nonempty_multi_indices(seq: CoverSequence, n: int, cap: int = DEFAULT_MAX_INDICES) -> tuple[MultiIndex, ...]:
    """Multi-indices at level ``n`` with nonempty ``W``, in lexicographic order.

    Prunes by depth-first search; raises :class:`CapExceeded` beyond ``cap``.
    """
    out: list[MultiIndex] = []

    def walk(prefix: MultiIndex, k: int):
        for i in range(omega_size(seq, k)):
            alpha = prefix + (i,)
            if _w_region(seq, alpha).is_empty():
                continue
            if k == n:
                out.append(alpha)
                if len(out) > cap:
                    raise CapExceeded(f"more than {cap} nonempty multi-indices at level {n}")
            else:
                walk(alpha, k + 1)

    walk((), 0)
    return tuple(out)


# -- eventually periodic index sequences -------------------------------------


def _primitive(cycle: tuple[int, ...]) -> tuple[int, ...]:
    q = len(cycle)
    for d in range(1, q + 1):
        if q % d == 0 and cycle == cycle[:d] * (q // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class OmegaPoint:
    """Eventually periodic sequence ``head + cycle + cycle + ...``.

    Stored in normal form (shortest head, primitive cycle), so equality of
    values is equality of sequences.
    """

    head: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        head = tuple(int(a) for a in self.head)
        cycle = tuple(int(a) for a in self.cycle)
        if not cycle:
            raise CoverError("an OmegaPoint needs a nonempty cycle")
        if any(a < 0 for a in head + cycle):
            raise CoverError("indices are natural numbers")
        cycle = _primitive(cycle)
        while head and head[-1] == cycle[-1]:
            cycle = (head[-1],) + cycle[:-1]
            head = head[:-1]
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def constant(cls, a: int) -> OmegaPoint:
        return cls((), (a,))

    def __getitem__(self, k: int) -> int:
        if k < len(self.head):
            return self.head[k]
        return self.cycle[(k - len(self.head)) % len(self.cycle)]

    def truncate(self, n: int) -> MultiIndex:
        return tuple(self[k] for k in range(n + 1))

    def tail_from(self, k: int) -> OmegaPoint:
        """The sequence ``(a_k, a_{k+1}, ...)``."""
        if k <= len(self.head):
            return OmegaPoint(self.head[k:], self.cycle)
        shift = (k - len(self.head)) % len(self.cycle)
        return OmegaPoint((), self.cycle[shift:] + self.cycle[:shift])

    def with_prefix(self, prefix: Sequence[int]) -> OmegaPoint:
        """``prefix`` followed by this whole sequence."""
        return OmegaPoint(tuple(prefix) + self.head, self.cycle)

    def replace_prefix(self, prefix: Sequence[int]) -> OmegaPoint:
        """Overwrite positions ``0..len(prefix)-1`` with ``prefix``."""
        return self.tail_from(len(prefix)).with_prefix(prefix)

    def __str__(self) -> str:
        return format_omega(self)


def _join(indices: Sequence[int]) -> str:
    if all(a < 10 for a in indices):
        return "".join(str(a) for a in indices)
    return ".".join(str(a) for a in indices)


def format_omega(a: OmegaPoint) -> str:
    """``head|cycle`` as used in arrow literals, e.g. ``0|2`` for 0222..."""
    return f"{_join(a.head)}|{_join(a.cycle)}"


def _split_indices(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    if "." in text or " " in text:
        return tuple(int(tok) for tok in text.replace(".", " ").split())
    return tuple(int(ch) for ch in text)


def parse_omega(text: str) -> OmegaPoint:
    if "|" not in text:
        raise CoverError(f"OmegaPoint literal {text!r} needs 'head|cycle'")
    head, cycle = text.split("|", 1)
    return OmegaPoint(_split_indices(head), _split_indices(cycle))


def _check_span(seq: CoverSequence, a: OmegaPoint) -> int:
    """Positions after which both ``a`` and the cover sizes repeat with a common period."""
    return max(len(a.head), seq.prefix_length) + math.lcm(len(a.cycle), seq.period)


def check_omega_point(seq: CoverSequence, a: OmegaPoint) -> None:
    for k in range(_check_span(seq, a)):
        if not 0 <= a[k] < omega_size(seq, k):
            raise CoverError(f"{format_omega(a)} uses index {a[k]} at level {k}, where the cover has {omega_size(seq, k)} members")


def is_valid_omega_point(seq: CoverSequence, a: OmegaPoint) -> bool:
    try:
        check_omega_point(seq, a)
    except CoverError:
        return False
    return True


def truncate(a: OmegaPoint, n: int) -> MultiIndex:
    """``a|n = (a_0, ..., a_n)``."""
    if n < 0:
        raise CoverError("truncation level must be nonnegative")
    return a.truncate(n)


def last_difference(a: OmegaPoint, b: OmegaPoint) -> int | None:
    """Largest position where ``a`` and ``b`` differ; -1 if equal; None if they differ infinitely often."""
    start = max(len(a.head), len(b.head))
    span = math.lcm(len(a.cycle), len(b.cycle))
    if any(a[k] != b[k] for k in range(start, start + span)):
        return None
    for k in range(start - 1, -1, -1):
        if a[k] != b[k]:
            return k
    return -1


def tail_equivalent(a: OmegaPoint, b: OmegaPoint) -> tuple[bool, int | None]:
    """Whether the sequences agree beyond some position.

    Returns ``(True, n)`` with the least ``n`` such that ``a_k == b_k`` for all
    ``k > n`` (``n == -1`` when the sequences are identical), else
    ``(False, None)``.
    """
    d = last_difference(a, b)
    return (d is not None, d)


def stabilization_level(seq: CoverSequence, *points: OmegaPoint) -> int:
    """Level from which ``W_{a|N}`` no longer changes, for every given ``a``.

    Beyond ``max(len(head), prefix)`` both the chosen indices and the covers
    repeat with period ``lcm(cycle, period)``, so after one full period no new
    member enters the intersection.
    """
    level = 0
    for a in points:
        level = max(level, max(len(a.head), seq.prefix_length) + math.lcm(len(a.cycle), seq.period) - 1)
    return level


def stable_w(seq: CoverSequence, a: OmegaPoint) -> Region:
    """The infinite intersection of ``V^(k)_{a_k}`` (it is open here)."""
    return w_region(seq, a.truncate(stabilization_level(seq, a)))


@lru_cache(maxsize=None)
def stable_w_closure(seq: CoverSequence, a: OmegaPoint) -> tuple[Region, int]:
    """``F_a`` = intersection over N of closure(W_{a|N}), and the level where the chain settles."""
    check_omega_point(seq, a)
    bound = stabilization_level(seq, a)
    chain = [w_closure(seq, a.truncate(n)) for n in range(bound + 1)]
    final = chain[-1]
    settled = bound
    while settled > 0 and chain[settled - 1] == final:
        settled -= 1
    return final, settled


def greedy_index(seq: CoverSequence, k: int, t) -> int:
    """Least member index at level ``k`` whose member contains ``t``."""
    for i, member in enumerate(seq.cover(k)):
        if rg.contains(member, t):
            return i
    raise CoverError(f"level {k} does not cover {t}")


def greedy_sequence(seq: CoverSequence, t, start: int = 0) -> OmegaPoint:
    """Positions ``start, start+1, ...`` of the greedy choice of members containing ``t``.

    The greedy choice depends only on the cover at each level, so it is
    periodic once the cover sequence is.  Returned as an OmegaPoint indexed
    from 0 (i.e. element ``j`` is the choice at level ``start + j``).
    """
    head_levels = range(start, max(start, seq.prefix_length))
    head = tuple(greedy_index(seq, k, t) for k in head_levels)
    base = max(start, seq.prefix_length)
    cycle = tuple(greedy_index(seq, k, t) for k in range(base, base + seq.period))
    return OmegaPoint(head, cycle)


# -- chambers ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Chamber:
    """Atom of the partition generated by every ``W_a`` and its closure at one level.

    ``open_signature`` lists the ``a`` with the chamber inside ``W_a``;
    ``closure_signature`` those with the chamber inside ``closure(W_a)``.
    """

    region: Region
    open_signature: tuple[MultiIndex, ...]
    closure_signature: tuple[MultiIndex, ...]
    level: int

    @cached_property
    def open_position(self) -> dict:
        return {a: i for i, a in enumerate(self.open_signature)}

    @cached_property
    def closure_position(self) -> dict:
        return {a: i for i, a in enumerate(self.closure_signature)}

    @cached_property
    def open_in_closure(self) -> tuple[int, ...]:
        """Positions of the open signature inside the closure signature."""
        return tuple(self.closure_position[a] for a in self.open_signature)

    def signature(self, domain: str) -> tuple[MultiIndex, ...]:
        return self.open_signature if domain == "open" else self.closure_signature

    def position(self, domain: str) -> dict:
        return self.open_position if domain == "open" else self.closure_position

    @cached_property
    def sample(self) -> Fraction:
        return rg.sample_points(self.region)[0]

    def __repr__(self) -> str:
        return f"Chamber({self.region}, A={list(self.open_signature)}, closure={list(self.closure_signature)})"


@lru_cache(maxsize=None)
def _chambers(seq: CoverSequence, n: int, cap: int) -> tuple[Chamber, ...]:
    space = seq.space
    alphas = nonempty_multi_indices(seq, n, cap)
    opens = [_w_region(seq, a) for a in alphas]
    closed = [w_closure(seq, a) for a in alphas]
    family = opens + closed
    # group cells by membership vector; each class is one atom
    groups: dict[tuple[bool, ...], list] = {}
    order: list[tuple[bool, ...]] = []
    for kind, lo, hi, probe in rg._cells(space, family):
        vec = tuple(rg.contains(r, probe) for r in family)
        if vec not in groups:
            groups[vec] = []
            order.append(vec)
        groups[vec].append((kind, lo, hi))
    out = []
    k = len(alphas)
    for vec in order:
        pieces = [(lo, hi, kind == "pt", kind == "pt") for kind, lo, hi in groups[vec]]
        reg = rg.normalize(space, pieces)
        A = tuple(a for a, inside in zip(alphas, vec[:k]) if inside)
        C = tuple(a for a, inside in zip(alphas, vec[k:]) if inside)
        out.append(Chamber(reg, A, C, n))
    return tuple(out)


def chambers(seq: CoverSequence, n: int, cap: int = DEFAULT_MAX_INDICES) -> list[Chamber]:
    """Chambers at level ``n``, ordered by their leftmost point."""
    if n < 0:
        raise CoverError("levels are nonnegative")
    return list(_chambers(seq, n, cap))


def locate(seq: CoverSequence, n: int, t) -> int:
    """Index of the level-``n`` chamber containing ``t``."""
    for i, ch in enumerate(_chambers(seq, n, DEFAULT_MAX_INDICES)):
        if rg.contains(ch.region, t):
            return i
    raise CoverError(f"{t} lies outside the space")


# -- built-in sequences --------------------------------------------------------


def _cover(space: Space, *members) -> Cover:
    return tuple(rg.normalize(space, [m]) if m is not None else space.empty() for m in members)


def example_A() -> CoverSequence:
    """T = [-1,1]; every level is {[-1,0), (0,1], [-1,1]}."""
    T = rg.IntervalSpace((-1, 1))
    cov = _cover(T, (-1, 0, True, False), (0, 1, False, True), (-1, 1))
    return CoverSequence(T, (), (cov,), name="example_A")


def example_B() -> CoverSequence:
    """T = [0,1]; level 0 is {T, (1/2,1]}, every later level is {T}."""
    T = rg.IntervalSpace((0, 1))
    first = _cover(T, (0, 1), ("1/2", 1, False, True))
    rest = _cover(T, (0, 1))
    return CoverSequence(T, (first,), (rest,), name="example_B")


def example_C() -> CoverSequence:
    """T = [0,1]; every level is {T, (1/2,1]}."""
    T = rg.IntervalSpace((0, 1))
    cov = _cover(T, (0, 1), ("1/2", 1, False, True))
    return CoverSequence(T, (), (cov,), name="example_C")


def uhf(factors: Sequence[int], prefix: Sequence[int] = ()) -> CoverSequence:
    """Point space; level k is ``m_k`` copies of the point.

    ``prefix`` lists the first factors, ``factors`` repeats forever.
    """
    if not factors:
        raise CoverError("uhf needs at least one repeating factor")
    for m in tuple(prefix) + tuple(factors):
        if int(m) < 1:
            raise CoverError("uhf factors must be at least 1")
    pt = rg.FiniteSpace(1)
    whole = pt.whole()
    pre = tuple((whole,) * int(m) for m in prefix)
    cyc = tuple((whole,) * int(m) for m in factors)
    label = "uhf(" + ",".join(str(m) for m in factors) + ")"
    if prefix:
        label = "uhf(" + ",".join(str(m) for m in prefix) + ";" + ",".join(str(m) for m in factors) + ")"
    return CoverSequence(pt, pre, cyc, name=label)


def builtin(name: str) -> CoverSequence:
    """Look up ``example_A``, ``example_B``, ``example_C`` or ``uhf(m1,m2,...)``.

    ``uhf(p1,...;c1,...)`` gives an explicit prefix before the repeating factors.
    """
    key = name.strip()
    table = {"example_A": example_A, "example_B": example_B, "example_C": example_C}
    if key in table:
        return table[key]()
    if key.startswith("uhf(") and key.endswith(")"):
        body = key[4:-1]
        if ";" in body:
            pre, cyc = body.split(";", 1)
        else:
            pre, cyc = "", body
        prefix = [int(x) for x in pre.split(",") if x.strip()]
        factors = [int(x) for x in cyc.split(",") if x.strip()]
        return uhf(factors, prefix)
    raise CoverError(f"unknown built-in cover sequence {name!r}")
