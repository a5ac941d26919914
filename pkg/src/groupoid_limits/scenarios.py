"""Named regression scenarios with their expected outcomes.

Each scenario returns a report dict with an ``ok`` flag and the individual
``checks`` it asserted.  All of them use the trivial cocycle.
"""

from __future__ import annotations

import numpy as np

from . import region as rg
from .convolution import random_element
from .covers import example_A, example_B, example_C
from .embeddings import can_separate, check_direct_limit, level_dimension, separation_construction, uhf_from_factors
from .finite_level import level_view
from .limit import (
    BasicSet,
    basic_range,
    basic_range_is_open,
    compose_limit,
    format_arrow,
    in_closure_G_infinity,
    in_G,
    in_G_check_infinity,
    in_G_infinity,
    parse_arrow,
    script_local_compactness_failure,
)


def _finish(name: str, checks: dict, details: dict) -> dict:
    return {"scenario": name, "checks": checks, "details": details, "ok": all(checks.values())}


def rem_sharp() -> dict:
    seq = example_A()
    g = parse_arrow("(|0, 0, |0)")
    x = parse_arrow("(0|2, 0, |2)")
    y = parse_arrow("(|2, 0, 1|2)")
    z = compose_limit(x, y)
    checks = {
        "g not in G_infinity": not in_G_infinity(seq, g),
        "g in closure(G_infinity)": in_closure_G_infinity(seq, g),
        "x in closure(G_infinity)": in_closure_G_infinity(seq, x),
        "y in closure(G_infinity)": in_closure_G_infinity(seq, y),
        "z in G_check_infinity": in_G_check_infinity(seq, z),
        "z not in closure(G_infinity)": not in_closure_G_infinity(seq, z),
        "g not in G": not in_G(seq, g)[0],
    }
    details = {"g": format_arrow(g), "x": format_arrow(x), "y": format_arrow(y), "z": format_arrow(z)}
    return _finish("rem_sharp", checks, details)


def gcheck_not_etale() -> dict:
    seq = example_B()
    U = rg.region(seq.space, ("1/4", "3/4", False, False))
    B = BasicSet(0, (0,), (1,), U)
    r = basic_range(seq, B)
    expected = rg.region(seq.space, ("1/2", "3/4", True, False))
    is_open = basic_range_is_open(seq, B)
    checks = {
        "range is [1/2,3/4)": r.region == expected,
        "range not relatively open": not is_open,
    }
    details = {"range": str(r.region), "fiber": str(r.fiber), "relatively_open": is_open}
    return _finish("gcheck_not_etale", checks, details)


def ginfty_not_loc_compact() -> dict:
    report = script_local_compactness_failure(example_C())
    checks = {
        "x_k in G_infinity for k=3..10": report["all_in_G_infinity"],
        "limit in G_check_infinity": report["limit_in_G_check_infinity"],
        "limit not in G_infinity": not report["limit_in_G_infinity"],
    }
    return _finish("ginfty_not_loc_compact", checks, report)


def separation(max_level: int = 12) -> dict:
    c = separation_construction()
    sep, why = can_separate(c.seq, c.x, c.y, max_level)
    checks = {
        "x in G": in_G(c.seq, c.x)[0],
        "y in G": in_G(c.seq, c.y)[0],
        f"not separated up to level {max_level}": not sep,
    }
    return _finish("separation", checks, {"x": format_arrow(c.x), "y": format_arrow(c.y), "explanation": why})


def uhf_2inf(max_level: int = 10, seed: int = 0) -> dict:
    seq = uhf_from_factors((2,))
    dims = [level_dimension(seq, n) for n in range(max_level + 1)]
    rng = np.random.default_rng(seed)
    direct = all(check_direct_limit(random_element(level_view(seq, n), rng)) for n in range(3))
    checks = {
        "dimensions are 2^(n+1)": dims == [2 ** (n + 1) for n in range(max_level + 1)],
        "direct limit compatible": direct,
    }
    return _finish("uhf_2inf", checks, {"dimensions": dims})


SCENARIOS = {
    "rem_sharp": rem_sharp,
    "gcheck_not_etale": gcheck_not_etale,
    "ginfty_not_loc_compact": ginfty_not_loc_compact,
    "separation": separation,
    "uhf_2inf": uhf_2inf,
}


def run(name: str) -> dict:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    return SCENARIOS[name]()
