"""JSON input and output for cover sequences, cocycles and elements.

Rationals are written as strings (``"1/2"``), complex numbers as ``[re, im]``.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import numpy as np

from . import region as rg
from .cocycles import CocycleData, random_coboundary, trivial
from .convolution import AlgebraElement, random_element
from .covers import CoverError, CoverSequence, builtin
from .finite_level import level_view
from .region import Region, Space


class FormatError(ValueError):
    pass


def load_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def dumps(data: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(data, sort_keys=True, indent=2)


# -- regions and spaces ----------------------------------------------------------------


def space_from_json(obj: dict) -> Space:
    kind = obj.get("type", "interval")
    if kind == "finite":
        return rg.FiniteSpace(int(obj["size"]))
    if kind == "interval":
        return rg.IntervalSpace(*[tuple(c) for c in obj["components"]])
    raise FormatError(f"unknown space type {kind!r}")


def space_to_json(space: Space) -> dict:
    if space.discrete:
        return {"type": "finite", "size": space.size}
    return {"type": "interval", "components": [[rg.format_rational(a), rg.format_rational(b)] for a, b in space.components]}


def region_from_json(space: Space, obj) -> Region:
    """A list of ``{lo, hi, lo_closed, hi_closed}`` records, or ``{"points": [...]}`` on a finite space."""
    if isinstance(obj, dict) and "points" in obj:
        return rg.points_region(space, [int(i) for i in obj["points"]])
    if not isinstance(obj, list):
        raise FormatError(f"a region is a list of interval records, got {obj!r}")
    return rg.normalize(space, [dict(r) if isinstance(r, dict) else r for r in obj])


def region_to_json(r: Region) -> list[dict]:
    return [
        {"lo": rg.format_rational(iv.lo), "hi": rg.format_rational(iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}
        for iv in r.intervals
    ]


# -- cover sequences ---------------------------------------------------------------------


def cover_from_json(obj: dict) -> CoverSequence:
    if "builtin" in obj:
        return builtin(obj["builtin"])
    space = space_from_json(obj["space"])
    prefix = tuple(tuple(region_from_json(space, m) for m in level) for level in obj.get("prefix", []))
    cycle = tuple(tuple(region_from_json(space, m) for m in level) for level in obj["tail_cycle"])
    return CoverSequence(space, prefix, cycle, name=obj.get("name", "custom"))


def cover_to_json(seq: CoverSequence) -> dict:
    return {
        "name": seq.name,
        "space": space_to_json(seq.space),
        "prefix": [[region_to_json(m) for m in level] for level in seq.prefix],
        "tail_cycle": [[region_to_json(m) for m in level] for level in seq.cycle],
    }


def load_cover(source: str) -> CoverSequence:
    """A built-in name such as ``example_A`` or ``uhf(2,3)``, or a JSON file path."""
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise FormatError(f"no such file: {source}")
        try:
            return cover_from_json(load_json(path))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"{source}: malformed cover file ({exc!r})") from None
    try:
        return builtin(source)
    except CoverError as exc:
        raise FormatError(str(exc)) from None


# -- cocycles --------------------------------------------------------------------------------


def cocycle_from_json(seq: CoverSequence, obj: dict) -> CocycleData:
    level = int(obj["level"])
    view = level_view(seq, level)
    kind = obj.get("kind", "trivial")
    if kind == "trivial":
        return trivial(view)
    if kind == "coboundary":
        return random_coboundary(view, int(obj.get("seed", 0)), int(obj.get("denominator", 12)))
    if kind != "explicit":
        raise FormatError(f"unknown cocycle kind {kind!r}")
    entries = obj["entries"]
    if len(entries) != len(view.chambers):
        raise FormatError(f"expected {len(view.chambers)} chamber tables, got {len(entries)}")
    turns = [np.vectorize(lambda s: Fraction(str(s)), otypes=[object])(np.array(tab, dtype=object)) for tab in entries]
    den = 1
    for tab in turns:
        for q in tab.flat:
            den = math.lcm(den, q.denominator)
    tables = [np.vectorize(lambda q: int(q * den) % den, otypes=[np.int64])(tab) if tab.size else np.zeros(tab.shape, dtype=np.int64) for tab in turns]
    return CocycleData(view, tables, den)


def cocycle_to_json(d: CocycleData) -> dict:
    if d.exact:
        entries = [[[[rg.format_rational(Fraction(int(v), d.denominator)) for v in row] for row in mat] for mat in tab] for tab in d.tables]
        return {"level": d.level, "kind": "explicit", "entries": entries}
    raise FormatError("only exactly stored cocycles can be written")


# -- elements --------------------------------------------------------------------------------


def element_from_json(seq: CoverSequence, obj: dict) -> AlgebraElement:
    level = int(obj["level"])
    view = level_view(seq, level)
    domain = obj.get("domain", "open")
    if "random" in obj:
        return random_element(view, np.random.default_rng(int(obj["random"].get("seed", 0))), domain)
    blocks = [np.zeros((len(ch.signature(domain)),) * 2, dtype=complex) for ch in view.chambers]
    for rec in obj.get("chambers", []):
        i = int(rec["id"])
        if not 0 <= i < len(blocks):
            raise FormatError(f"chamber id {i} out of range")
        m = np.array(rec["matrix"], dtype=float)
        if m.ndim != 3 or m.shape[-1] != 2:
            raise FormatError("matrix entries are [re, im] pairs")
        blocks[i] = m[..., 0] + 1j * m[..., 1]
    return AlgebraElement(view, domain, blocks)


def element_to_json(f: AlgebraElement) -> dict:
    return {
        "level": f.level,
        "domain": f.domain,
        "chambers": [
            {"id": i, "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in b]} for i, b in enumerate(f.blocks)
        ],
    }
