"""``gridheal`` command line.

Exit codes: 0 ok, 2 plan fails verification (verify, map), 3 infeasible,
4 a solved plan failed verification, 5 no proven optimum (time limit or
solver error), 64 usage or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .coverage import fleet_candidates
from .formulation import ExtractionError
from .generator import random_tiny
from .geomap import UnverifiedPlanError, emit_map
from .grid import ScenarioError, apply_damage, dump_scenario, load_scenario, validate
from .plan import RestorationPlan
from .powerflow import verify_plan
from .solvers import BACKENDS, BackendError
from .strategies import STRATEGIES, row_for, run_compare, run_strategy

EXIT_OK = 0
EXIT_VERIFY_FAIL = 2
EXIT_INFEASIBLE = 3
EXIT_UNVERIFIED = 4
EXIT_NO_OPTIMUM = 5
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _scenario(path: str):
    try:
        s = load_scenario(path)
    except (OSError, ScenarioError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load scenario {path}: {exc}") from exc
    problems = validate(s)
    if problems:
        lines = "\n".join(f"  {v.entity}: {v.invariant}" for v in problems)
        raise UsageError(f"scenario {path} violates invariants:\n{lines}")
    return s


def _plan(path: str) -> RestorationPlan:
    try:
        return RestorationPlan.from_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot load plan {path}: {exc}") from exc


def cmd_solve(args) -> int:
    s = _scenario(args.scenario)
    try:
        outcome = run_strategy(s, args.strategy, args.backend, args.mode, args.time_limit)
    except ExtractionError as exc:
        print(f"solution rejected: {exc}", file=sys.stderr)
        return EXIT_UNVERIFIED
    if outcome.status == "infeasible":
        print(f"{args.strategy}: infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    if outcome.plan is None:
        print(f"{args.strategy}: {outcome.status} {outcome.message}".rstrip(), file=sys.stderr)
        return EXIT_NO_OPTIMUM
    if outcome.status == "unverified":
        print(_dumps(outcome.report.to_dict()), file=sys.stderr, end="")
        print(f"{args.strategy}: plan failed verification ({', '.join(outcome.report.failed())})",
              file=sys.stderr)
        return EXIT_UNVERIFIED
    plan = outcome.plan
    if args.format == "text":
        row = row_for(s, outcome)
        text = (
            f"strategy      {plan.strategy}\n"
            f"restored_mw   {plan.restored_mw:.6g}\n"
            f"travel_sq_m2  {plan.travel_sq:.6g}\n"
            f"microgrids    {row.mg_count}\n"
            f"closed        {' '.join(plan.closed_branches()) or '/'}\n"
            f"restored_sw   {' '.join(row.switches_restored) or '/'}\n"
        )
        for k, p in sorted(plan.dsc_placements.items()):
            text += f"dsc {k:<9} ({p.position[0]:.3f}, {p.position[1]:.3f})\n"
        _emit(text, args.out)
    else:
        _emit(plan.to_json(), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    s = _scenario(args.scenario)
    table, _ = run_compare(s, args.backend, args.mode, args.time_limit, parallel=args.parallel)
    _emit(table.to_text(s) if args.format == "text" else _dumps(table.to_dict()), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    s = _scenario(args.scenario)
    report = verify_plan(s, _plan(args.plan), tol=args.tol)
    _emit(_dumps(report.to_dict()), args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def cmd_candidates(args) -> int:
    s = _scenario(args.scenario)
    state = apply_damage(s)
    fleet = s.dscs
    if args.dsc:
        fleet = tuple(d for d in s.dscs if d.id == args.dsc)
        if not fleet:
            raise UsageError(f"no drone {args.dsc!r} in scenario")
    doc = {d.id: c.to_dict() for d, c in zip(fleet, fleet_candidates(state, fleet, prune=not args.no_prune))}
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_map(args) -> int:
    s = _scenario(args.scenario)
    try:
        doc = emit_map(s, _plan(args.plan))
    except UnverifiedPlanError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VERIFY_FAIL
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    _emit(dump_scenario(random_tiny(args.seed)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gridheal", description="Distribution restoration with drone-restored switch communication.")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, scenario=True, out_help="output file (default stdout)"):
        if scenario:
            sp.add_argument("--scenario", required=True, help="scenario JSON file")
        sp.add_argument("--out", help=out_help)

    def solver_flags(sp):
        sp.add_argument("--backend", choices=sorted(BACKENDS), help="MILP backend (default from GRIDHEAL_BACKEND, else highs)")
        sp.add_argument("--mode", choices=("discrete", "continuous"), help="drone position model (default from scenario)")
        sp.add_argument("--time-limit", type=float, help="seconds per solve")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("solve", help="solve one strategy and write the verified plan")
    common(sp, out_help="plan file (default stdout)")
    sp.add_argument("--strategy", choices=STRATEGIES, default="proposed")
    solver_flags(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("compare", help="solve every strategy and tabulate")
    common(sp)
    solver_flags(sp)
    sp.add_argument("--parallel", action="store_true", help="run strategies concurrently")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("verify", help="check a plan against the scenario")
    common(sp)
    sp.add_argument("--plan", required=True, help="plan JSON file")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("candidates", help="dump candidate drone positions and coverage")
    common(sp)
    sp.add_argument("--dsc", help="only this drone")
    sp.add_argument("--no-prune", action="store_true", help="keep dominated candidates")
    sp.set_defaults(func=cmd_candidates)

    sp = sub.add_parser("map", help="GeoJSON map of a verified plan")
    common(sp)
    sp.add_argument("--plan", required=True, help="plan JSON file")
    sp.set_defaults(func=cmd_map)

    sp = sub.add_parser("gen", help="write a seeded random tiny scenario")
    common(sp, scenario=False)
    sp.add_argument("--seed", type=int, required=True)
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gridheal: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendError as exc:
        print(f"gridheal: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
