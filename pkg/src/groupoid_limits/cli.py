"""Command-line entry point ``groupoid-limits``.

Exit codes: 0 success, 1 a checked assertion failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .cocycles import CocycleError, boundary_audit, trivial, verify_cocycle
from .convolution import AlgebraError, element_norms, i_norm, random_element, reduced_norm
from .covers import CapExceeded, CoverError, validate
from .embeddings import (
    CylinderCheckError,
    can_separate,
    check_direct_limit,
    isometry_check,
    level_dimension,
    separation_construction,
    support_witness,
    uhf_from_factors,
)
from .finite_level import groupoid_report, level_view
from .formats import FormatError, cocycle_from_json, dumps, element_from_json, load_cover, load_json
from .limit import format_arrow, parse_arrow
from .region import RegionError
from .scenarios import SCENARIOS
from .scenarios import run as run_scenario

THREADS_ENV = "GROUPOID_LIMITS_THREADS"
INPUT_ERRORS = (FormatError, CoverError, RegionError, CocycleError, AlgebraError, CapExceeded, KeyError, ValueError, OSError)


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    seed: int = 0
    level: int = 0
    max_level: int = 2
    trials: int = 50
    tolerance: float = 1e-8
    output: str = "text"
    threads: int = 1

    def __post_init__(self):
        if not 0 < self.tolerance <= 1e-3:
            raise InputError("--tolerance must lie in (0, 1e-3]")
        if self.level < 0 or self.max_level < 0 or self.trials < 1:
            raise InputError("levels must be nonnegative and --trials positive")


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer") from None
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer")
    return n


# -- commands: each returns (ok, report) ------------------------------------------------------


def cmd_validate(cfg: RunConfig) -> tuple[bool, dict]:
    seq = load_cover(cfg.inputs["input"])
    issues = validate(seq)
    report: dict = {"sequence": seq.name, "cover_issues": [str(i) for i in issues]}
    ok = not issues
    if cfg.inputs.get("cocycle"):
        d = cocycle_from_json(seq, load_json(cfg.inputs["cocycle"]))
        violations = verify_cocycle(d)
        report["cocycle"] = {
            "level": d.level,
            "violations": [str(v) for v in violations[:20]],
            "violation_count": len(violations),
            "boundary_flags": boundary_audit(d),
        }
        ok = ok and not violations
    if cfg.inputs.get("element"):
        f = element_from_json(seq, load_json(cfg.inputs["element"]))
        report["element"] = {"level": f.level, "domain": f.domain, "chambers": len(f.blocks)}
    report["ok"] = ok
    return ok, report


def cmd_chambers(cfg: RunConfig) -> tuple[bool, dict]:
    seq = load_cover(cfg.inputs["input"])
    r = groupoid_report(seq, cfg.level)
    return r.axioms_ok, {"sequence": seq.name, **r.as_dict()}


def cmd_norms(cfg: RunConfig) -> tuple[bool, dict]:
    seq = load_cover(cfg.inputs["input"])
    if not cfg.inputs.get("element"):
        raise InputError("norms needs --element")
    f = element_from_json(seq, load_json(cfg.inputs["element"]))
    if cfg.inputs.get("cocycle"):
        sigma = cocycle_from_json(seq, load_json(cfg.inputs["cocycle"]))
    else:
        sigma = trivial(level_view(seq, f.level))
    violations = verify_cocycle(sigma)
    rn, inorm = reduced_norm(f, sigma), i_norm(f)
    ok = not violations and rn <= inorm * (1 + cfg.tolerance)
    return ok, {
        "sequence": seq.name,
        "level": f.level,
        "domain": f.domain,
        "i_norm": inorm,
        "reduced_norm": rn,
        "chambers": element_norms(f, sigma),
        "cocycle_verified": not violations,
        "ok": ok,
    }


def cmd_isometry(cfg: RunConfig) -> tuple[bool, dict]:
    seq = load_cover(cfg.inputs["input"])
    r = isometry_check(seq, cfg.level, cfg.seed, cfg.trials, cfg.inputs.get("cocycle_kind", "trivial"), cfg.tolerance)
    return r.ok, r.as_dict()


def cmd_example(cfg: RunConfig) -> tuple[bool, dict]:
    name = cfg.inputs["name"]
    if name not in SCENARIOS:
        raise InputError(f"unknown example {name!r}; choose from {', '.join(sorted(SCENARIOS))}")
    r = run_scenario(name)
    return r["ok"], r


def cmd_report(cfg: RunConfig) -> tuple[bool, dict]:
    seq = load_cover(cfg.inputs["input"])
    issues = validate(seq)
    levels = []
    ok = not issues
    for n in range(cfg.max_level + 1):
        g = groupoid_report(seq, n)
        iso = {}
        for kind in ("trivial", "coboundary"):
            r = isometry_check(seq, n, cfg.seed, cfg.trials, kind, cfg.tolerance)
            iso[kind] = {"passed": r.passed, "trials": r.trials, "max_error": r.max_error}
            ok = ok and r.ok
        ok = ok and g.axioms_ok
        levels.append(
            {
                "level": n,
                "chamber_count": len(g.chambers),
                "chambers": [c["region"] for c in g.chambers],
                "open_fiber_sizes": g.open_fiber_sizes,
                "closure_fiber_sizes": g.closure_fiber_sizes,
                "axioms_ok": g.axioms_ok,
                "isometry": iso,
            }
        )
    report = {
        "sequence": seq.name,
        "cover_issues": [str(i) for i in issues],
        "levels": levels,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "tolerance": cfg.tolerance,
        "threads": cfg.threads,
        "norm": "reduced",
        "ok": ok,
    }
    return ok, report


def cmd_support_witness(cfg: RunConfig) -> tuple[bool, dict]:
    seq = load_cover(cfg.inputs["input"])
    x = parse_arrow(cfg.inputs["arrow"])
    w = support_witness(seq, x)
    return True, w.as_dict()


def cmd_separate(cfg: RunConfig) -> tuple[bool, dict]:
    if cfg.inputs.get("x") and cfg.inputs.get("y"):
        seq = load_cover(cfg.inputs["input"])
        x, y = parse_arrow(cfg.inputs["x"]), parse_arrow(cfg.inputs["y"])
    else:
        c = separation_construction()
        seq, x, y = c.seq, c.x, c.y
    sep, why = can_separate(seq, x, y, cfg.max_level)
    return True, {"x": format_arrow(x), "y": format_arrow(y), "max_level": cfg.max_level, "separated": sep, "explanation": why}


def cmd_uhf(cfg: RunConfig) -> tuple[bool, dict]:
    try:
        factors = [int(v) for v in cfg.inputs["factors"].split(",")]
    except ValueError:
        raise InputError("--factors is a comma-separated list of integers") from None
    seq = uhf_from_factors(factors)
    dims = [level_dimension(seq, n) for n in range(cfg.max_level + 1)]
    rng = np.random.default_rng(cfg.seed)
    checks = [check_direct_limit(random_element(level_view(seq, n), rng), seed=cfg.seed) for n in range(min(cfg.max_level, 2) + 1)]
    ok = all(checks)
    return ok, {"factors": factors, "dimensions": dims, "direct_limit_checks": checks, "ok": ok}


COMMANDS: dict[str, Callable[[RunConfig], tuple[bool, dict]]] = {
    "validate": cmd_validate,
    "chambers": cmd_chambers,
    "norms": cmd_norms,
    "isometry-check": cmd_isometry,
    "example": cmd_example,
    "report": cmd_report,
    "support-witness": cmd_support_witness,
    "separate": cmd_separate,
    "uhf": cmd_uhf,
}


# -- text rendering -----------------------------------------------------------------------------


def _render_text(command: str, ok: bool, report: dict) -> str:
    if command == "example" and report.get("scenario") == "gcheck_not_etale":
        d = report["details"]
        head = f"range {d['range']}, relatively open: {str(d['relatively_open']).lower()}"
        return head + "\n" + _render_checks(report)
    if command == "example":
        return _render_checks(report)
    if command == "chambers":
        lines = [f"{report['sequence']} level {report['level']}: {report['chamber_count']} chambers"]
        for c in report["chambers"]:
            lines.append(f"  {c['region']}: A={c['open_signature']} closure={c['closure_signature']}")
        lines.append(f"pair-groupoid axioms: {'ok' if report['axioms_ok'] else 'FAILED'}")
        return "\n".join(lines)
    if command == "isometry-check":
        r = report
        return (
            f"{r['sequence']} level {r['level']} ({r['cocycle']} cocycle, seed {r['seed']}): "
            f"{r['passed']}/{r['trials']} within {r['tolerance']:g}, max error {r['max_error']:.3g}"
        )
    lines = []
    for k in sorted(report):
        lines.append(f"{k}: {report[k]}")
    return "\n".join(lines)


def _render_checks(report: dict) -> str:
    lines = [f"{report['scenario']}: {'ok' if report['ok'] else 'FAILED'}"]
    for name, passed in report["checks"].items():
        lines.append(f"  [{'pass' if passed else 'FAIL'}] {name}")
    return "\n".join(lines)


# -- argument parsing ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="cover sequence: built-in name or JSON file")
    common.add_argument("--level", type=int, default=0)
    common.add_argument("--max-level", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=50)
    common.add_argument("--tolerance", type=float, default=1e-8)
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="groupoid-limits", description="Cover groupoids, their limit and twisted convolution algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a cover file, optionally with a cocycle or element")
    p.add_argument("--cocycle")
    p.add_argument("--element")
    sub.add_parser("chambers", parents=[common], help="chamber table and pair-groupoid audit at --level")
    p = sub.add_parser("norms", parents=[common], help="I-norm and reduced norm of an element")
    p.add_argument("--element")
    p.add_argument("--cocycle")
    p = sub.add_parser("isometry-check", parents=[common], help="compare ||phi_n(f)|| with ||f|| on random elements")
    p.add_argument("--cocycle", choices=("trivial", "coboundary"), default="trivial")
    p = sub.add_parser("example", parents=[common], help="run a named regression scenario")
    p.add_argument("name", choices=sorted(SCENARIOS))
    sub.add_parser("report", parents=[common], help="consolidated JSON report for a cover sequence")
    p = sub.add_parser("support-witness", parents=[common], help="level and matrix unit supporting an arrow of G")
    p.add_argument("--arrow", required=True)
    p = sub.add_parser("separate", parents=[common], help="whether cylinder images separate two arrows")
    p.add_argument("--x")
    p.add_argument("--y")
    p = sub.add_parser("uhf", parents=[common], help="level dimensions and direct-limit check for a UHF sequence")
    p.add_argument("--factors", default="2")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    inputs = {"input": args.input}
    for key in ("cocycle", "element", "name", "arrow", "x", "y", "factors"):
        if hasattr(args, key):
            inputs[key] = getattr(args, key)
    if args.command == "isometry-check":
        inputs["cocycle_kind"] = inputs.pop("cocycle")
    needs_input = {"validate", "chambers", "norms", "isometry-check", "report", "support-witness"}
    if args.command in needs_input and not args.input:
        raise InputError(f"{args.command} needs --input")
    if args.command == "separate" and bool(args.x) != bool(args.y):
        raise InputError("separate needs both --x and --y, or neither")
    if args.command == "separate" and args.x and not args.input:
        raise InputError("separate with --x/--y needs --input")
    defaults = {"separate": 12, "uhf": 10}
    max_level = args.max_level if args.max_level is not None else defaults.get(args.command, 2)
    return RunConfig(
        command=args.command,
        inputs=inputs,
        seed=args.seed,
        level=args.level,
        max_level=max_level,
        trials=args.trials,
        tolerance=args.tolerance,
        output=args.format,
        threads=_threads(),
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = _config(args)
        ok, report = COMMANDS[cfg.command](cfg)
    except CylinderCheckError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (InputError, *INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.output == "json":
        print(dumps(report))
    else:
        print(_render_text(cfg.command, ok, report))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
