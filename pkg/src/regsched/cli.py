"""Command-line interface: solve, eval, gen, bench, export-lp."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import bench as bench_mod
from .bnb import BnbOptions, solve
from .core import dumps, load_instance, load_schedule, save_instance, save_schedule, validate_and_normalize
from .errors import InvalidWarmStart, MethodUnavailable, NumericalFailure, RegschedError
from .gen import GenProfile, generate
from .heuristics import DecompOptions, decomposition, lb_heuristic, mp_heuristic
from .mip import build_model, export_lp
from .regret import max_regret
from .unit import solve_unit

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

log = logging.getLogger("regsched")


class InputError(Exception):
    """Bad user input detected by the CLI itself."""


def _instance(path: str):
    try:
        return validate_and_normalize(load_instance(path))
    except (TypeError, KeyError) as exc:
        raise InputError(f"{path}: malformed instance ({exc})") from exc


def cmd_solve(args) -> int:
    instance = _instance(args.input)
    warm = load_schedule(args.warm_start) if args.warm_start else None
    if warm is not None and args.method != "exact":
        raise InputError("--warm-start only applies to --method exact")
    t0 = time.perf_counter()
    result: dict = {"method": args.method}
    if args.method == "exact":
        res = solve(
            instance,
            BnbOptions(time_limit=args.time_limit, gap_tolerance=args.gap, warm_start=warm),
        )
        schedule = res.incumbent
        result.update(res.to_dict())
    elif args.method == "algoA":
        schedule = solve_unit(instance).schedule
        result["status"] = "Optimal"
    elif args.method == "lb":
        schedule = lb_heuristic(instance)
        result["status"] = "Heuristic"
    elif args.method == "mp":
        schedule = mp_heuristic(instance)
        result["status"] = "Heuristic"
    else:
        m = args.blocks or bench_mod.default_blocks(instance.n)
        schedule = decomposition(instance, DecompOptions(m=m, polish_budget=args.polish, seed=args.seed))
        result["status"] = "Heuristic"
    elapsed = time.perf_counter() - t0
    value = max_regret(schedule, instance).regret
    if "ub" in result and result["ub"] != value:
        raise NumericalFailure(f"solver reported {result['ub']} but the schedule scores {value}")
    if args.method != "exact":
        result.update({"value": value, "ub": value, "lb": None, "gap_pct": None})
    result["time"] = elapsed
    result["schedule"] = list(schedule.order)
    out = Path(args.output)
    save_schedule(schedule, out)
    result_path = Path(args.result) if args.result else out.with_name(out.stem + ".result.json")
    result_path.write_text(dumps(result))
    print(f"{args.method}: value {value} ({result['status']}) -> {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    instance = _instance(args.input)
    schedule = load_schedule(args.schedule)
    print(json.dumps(max_regret(schedule, instance).to_dict(), indent=2))
    return EXIT_OK


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        inst = generate(GenProfile(args.profile, args.n, seed, unit_weights=args.unit_weights))
        path = out / f"{args.profile}_n{args.n}_s{seed}.json"
        save_instance(inst, path)
        print(path)
    return EXIT_OK


def cmd_bench(args) -> int:
    opts = bench_mod.BenchOptions(
        time_limit=args.time_limit,
        gap_tolerance=args.gap,
        blocks=args.blocks,
        polish=args.polish,
        unit_weights=args.unit_weights,
        workers=args.workers,
    )
    report = bench_mod.run_bench(args.profile, args.sizes, args.reps, args.methods, args.base_seed, opts)
    if args.out:
        out = Path(args.out)
        out.write_text(report.rows_csv())
        summary = out.with_name(out.stem + ".summary.csv")
        summary.write_text(report.summary_csv())
        print(report.summary_csv(), end="")
    else:
        print(report.to_csv(), end="")
    return EXIT_OK


def cmd_export_lp(args) -> int:
    instance = _instance(args.input)
    Path(args.out).write_text(export_lp(build_model(instance, tight=args.tight)))
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _methods(text: str) -> list[str]:
    methods = [m for m in text.split(",") if m]
    bad = [m for m in methods if m not in bench_mod.METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown method(s): {', '.join(bad)}")
    return methods


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regsched", description="Min-max regret scheduling with interval due-dates.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--input", required=True)
    s.add_argument("--method", choices=bench_mod.METHODS, default="exact")
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--gap", type=float, default=0.0, help="relative gap tolerance in percent")
    s.add_argument("--warm-start", default=None, help="schedule JSON used as the initial incumbent")
    s.add_argument("--blocks", type=int, default=None, help="block count for decomp")
    s.add_argument("--polish", type=float, default=300.0, help="decomp polish budget in seconds")
    s.add_argument("--seed", type=int, default=0, help="decomp sampling seed")
    s.add_argument("--output", required=True, help="schedule JSON to write")
    s.add_argument("--result", default=None, help="result JSON (default: <output>.result.json)")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("eval", help="report the maximum regret of a schedule")
    e.add_argument("--input", required=True)
    e.add_argument("--schedule", required=True)
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("--profile", choices=("half", "high"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--unit-weights", action="store_true")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run a benchmark and write CSV")
    b.add_argument("--profile", choices=("half", "high"), required=True)
    b.add_argument("--sizes", type=_int_list, required=True, help="e.g. 10,15,20")
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--methods", type=_methods, default=["exact", "lb", "mp"])
    b.add_argument("--base-seed", type=int, default=0)
    b.add_argument("--time-limit", type=float, default=None)
    b.add_argument("--gap", type=float, default=0.0)
    b.add_argument("--blocks", type=int, default=None)
    b.add_argument("--polish", type=float, default=300.0)
    b.add_argument("--unit-weights", action="store_true")
    b.add_argument("--workers", type=int, default=None, help="parallel workers (capped by REGSCHED_THREADS)")
    b.add_argument("--out", default=None, help="CSV path; summary goes next to it")
    b.set_defaults(func=cmd_bench)

    x = sub.add_parser("export-lp", help="write the MIP in LP format")
    x.add_argument("--input", required=True)
    x.add_argument("--out", required=True)
    x.add_argument("--tight", action="store_true", help="export the strengthened formulation")
    x.set_defaults(func=cmd_export_lp)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InputError, OSError, ValueError, InvalidWarmStart, MethodUnavailable) as exc:
        # JSON decode errors and every instance/schedule validation error are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RegschedError, RuntimeError, AssertionError) as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
