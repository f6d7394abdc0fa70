"""Command line entry point: ``cliffcauchy verify | sweep | selftest | list``.

Exit codes: 0 when every check meets its expectation, 1 when some check does not,
2 for usage or scenario errors.  ``CLIFFCAUCHY_LOG`` selects quiet, info or debug logging.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import boundary
from .scenarios import (
    ScenarioError, bundled_scenario, bundled_scenarios, load_scenario, run_check,
    run_scenario, scenario_report,
)
from .structures import structure_residuals

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _setup_logging() -> None:
    name = os.environ.get("CLIFFCAUCHY_LOG", "quiet").lower()
    if name not in LOG_LEVELS:
        raise ScenarioError(f"CLIFFCAUCHY_LOG must be one of {sorted(LOG_LEVELS)}, got {name!r}")
    logging.basicConfig(level=LOG_LEVELS[name], format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def _resolve(arg: str) -> dict:
    """A path, or the name of a bundled scenario (with or without ``.json``)."""
    path = Path(arg)
    if path.exists():
        return load_scenario(path)
    name = arg if arg.endswith(".json") else arg + ".json"
    if name in bundled_scenarios():
        return bundled_scenario(name)
    raise ScenarioError(f"no scenario file or bundled scenario named {arg!r}")


def _summary_line(rep) -> str:
    worst = max(rep.residuals.items(), key=lambda kv: kv[1]) if rep.residuals else ("-", 0.0)
    label = rep.details.get("label", "")
    tag = "PASS" if rep.passed else "FAIL"
    kind = " (negative control)" if rep.expect == "fail" else ""
    return f"{tag} {rep.check}{kind} {label} q={rep.q} max {worst[0]}={worst[1]:.3e}".replace("  ", " ")


def cmd_verify(args) -> int:
    scn = _resolve(args.scenario)
    reports = run_scenario(scn, jobs=args.jobs)
    for rep in reports:
        print(_summary_line(rep))
    out = scenario_report(scn, reports, include_runtime=not args.no_runtime)
    text = json.dumps(out, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    passed = out["pass"]
    print(f"{scn.get('name', '')}: {sum(r.passed for r in reports)}/{len(reports)} checks as expected")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_sweep(args) -> int:
    scn = _resolve(args.scenario)
    try:
        orders = [int(s) for s in args.orders.split(",") if s.strip()]
    except ValueError as exc:
        raise ScenarioError(f"bad --orders value {args.orders!r}") from exc
    rows = []
    ok = True
    for q in orders:
        for i, entry in enumerate(scn["checks"]):
            local = dict(scn, checks=[dict(entry, q=q)])
            rep = run_check(local, 0)
            ok &= rep.passed
            for key, val in rep.residuals.items():
                rows.append({"index": i, "check": rep.check, "label": entry.get("label", ""), "q": q,
                             "residual": key, "value": f"{val:.6e}", "pass": int(rep.passed)})
    fields = ["index", "check", "label", "q", "residual", "value", "pass"]
    handle = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            handle.close()
    return EXIT_OK if ok else EXIT_FAIL


def selftest() -> dict[str, bool]:
    """Fast internal consistency checks, including one deliberate mutation."""
    out = {}
    out["algebra_relations"] = all(v <= 1e-12 for m in (2, 4) for v in structure_residuals(m).values())
    try:
        for m in (2, 4, 6):
            boundary.orientation_selftest(m)
        out["orientation"] = True
    except RuntimeError:
        out["orientation"] = False
    out["sphere_area"] = all(abs(boundary.quadrature_area(m, 16) - boundary.unit_sphere_area_closed(m))
                             <= 1e-9 * boundary.unit_sphere_area_closed(m) for m in (2, 3, 4, 6))
    scn = bundled_scenario("algebra_core.json")
    picks = [i for i, e in enumerate(scn["checks"]) if e["check"] == "measure_backends"]
    out["measure_backends"] = all(run_check(scn, i).passed for i in picks)
    return out


def cmd_selftest(args) -> int:
    res = selftest()
    for name, ok in res.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(res.values()) else EXIT_FAIL


def cmd_list(args) -> int:
    for name in bundled_scenarios():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cliffcauchy", description="Numerical checks of Clifford-analysis Cauchy formulas.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run every check of a scenario")
    v.add_argument("scenario", help="scenario JSON path or bundled scenario name")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker processes (default: available CPUs)")
    v.add_argument("--no-runtime", action="store_true", help="omit runtime fields from the report")
    v.set_defaults(func=cmd_verify)
    s = sub.add_parser("sweep", help="rerun a scenario at several quadrature orders")
    s.add_argument("scenario")
    s.add_argument("--orders", default="8,16,24,32")
    s.add_argument("--out", help="CSV output (stdout when omitted)")
    s.set_defaults(func=cmd_sweep)
    t = sub.add_parser("selftest", help="fast internal consistency checks")
    t.set_defaults(func=cmd_selftest)
    ls = sub.add_parser("list", help="list bundled scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _setup_logging()
        if getattr(args, "jobs", 1) < 1:
            raise ScenarioError("--jobs must be >= 1")
        return args.func(args)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
