"""Benchmark harness: generate instances, run methods, re-score, tabulate."""

from __future__ import annotations

import csv
import io
import logging
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

from .bnb import BnbOptions, gap_pct, solve
from .core import Instance, Schedule
from .errors import MethodUnavailable
from .gen import GenProfile, Profile, generate
from .heuristics import DecompOptions, decomposition, lb_heuristic, mp_heuristic
from .regret import max_regret
from .unit import solve_unit

log = logging.getLogger(__name__)

METHODS = ("exact", "algoA", "lb", "mp", "decomp")
COLUMNS = ("profile", "n", "seed", "method", "value", "time_ms", "status", "ub", "lb", "gap_pct")
SUMMARY_COLUMNS = ("n", "method", "count", "mean", "std", "mean_time_ms", "mean_gap_pct")


def gap_metric(ub: float, lb: float) -> float:
    """Q = (UB - LB) / UB * 100, rounded to 6 decimals; zero when UB <= 0."""
    return round(gap_pct(ub, lb), 6)


@dataclass(frozen=True)
class BenchOptions:
    time_limit: float | None = None
    gap_tolerance: float = 0.0
    blocks: int | None = None
    polish: float = 300.0
    unit_weights: bool = False
    workers: int | None = None


@dataclass(frozen=True)
class BenchRow:
    profile: str
    n: int
    seed: int
    method: str
    value: int
    time_ms: float
    status: str
    ub: int | None = None
    lb: float | None = None
    gap_pct: float | None = None

    def cells(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                out.append("")
            elif f.name == "time_ms":
                out.append(f"{v:.3f}")
            elif f.name in ("lb", "gap_pct"):
                out.append(f"{v:.6f}")
            else:
                out.append(str(v))
        return out


@dataclass(frozen=True)
class SummaryRow:
    n: int
    method: str
    count: int
    mean: float
    std: float
    mean_time_ms: float
    mean_gap_pct: float | None


@dataclass(frozen=True)
class BenchReport:
    rows: list[BenchRow]
    summary: list[SummaryRow]

    def rows_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for s in self.summary:
            gap = "" if s.mean_gap_pct is None else f"{s.mean_gap_pct:.6f}"
            w.writerow([s.n, s.method, s.count, f"{s.mean:.6f}", f"{s.std:.6f}", f"{s.mean_time_ms:.3f}", gap])
        return buf.getvalue()

    def to_csv(self) -> str:
        """Run rows, a blank line, then the summary block."""
        return self.rows_csv() + "\n" + self.summary_csv()


def default_blocks(n: int) -> int:
    return max(2, n // 10)


def _run_method(instance: Instance, method: str, options: BenchOptions) -> tuple[Schedule, dict]:
    if method == "exact":
        res = solve(instance, BnbOptions(time_limit=options.time_limit, gap_tolerance=options.gap_tolerance))
        return res.incumbent, {"status": res.status.value, "ub": res.ub, "lb": res.lb, "gap_pct": gap_metric(res.ub, res.lb)}
    if method == "algoA":
        if not instance.unit_weight:
            raise MethodUnavailable("algoA only applies to unit-weight instances")
        res = solve_unit(instance)
        return res.schedule, {"status": "Optimal", "ub": res.regret, "lb": float(res.regret), "gap_pct": 0.0}
    if method == "lb":
        return lb_heuristic(instance), {"status": "Heuristic"}
    if method == "mp":
        return mp_heuristic(instance), {"status": "Heuristic"}
    if method == "decomp":
        m = options.blocks or default_blocks(instance.n)
        m = min(m, instance.n)
        return decomposition(instance, DecompOptions(m=m, polish_budget=options.polish)), {"status": "Heuristic"}
    raise ValueError(f"unknown method {method!r}")


def _run_instance(task) -> list[BenchRow]:
    profile, n, seed, methods, options = task
    instance = generate(GenProfile(profile, n, seed, unit_weights=options.unit_weights))
    rows = []
    for method in methods:
        t0 = time.perf_counter()
        schedule, info = _run_method(instance, method, options)
        elapsed = (time.perf_counter() - t0) * 1000.0
        value = max_regret(schedule, instance).regret
        if "ub" in info and info["ub"] != value:
            raise RuntimeError(f"{method} on {instance.name}: reported {info['ub']} but schedule scores {value}")
        rows.append(BenchRow(Profile(profile).value, n, seed, method, value, elapsed, **info))
    _check_dominance(rows, instance.name)
    return rows


def _check_dominance(rows: list[BenchRow], name: str) -> None:
    proven = [r for r in rows if r.status == "Optimal"]
    if not proven:
        return
    best = proven[0].value
    for r in rows:
        if r.value < best or (r.status == "Optimal" and r.value != best):
            raise RuntimeError(f"{name}: {r.method} value {r.value} contradicts proven optimum {best}")


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("REGSCHED_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def summarize(rows: list[BenchRow]) -> list[SummaryRow]:
    groups: dict[tuple[int, str], list[BenchRow]] = {}
    for r in rows:
        groups.setdefault((r.n, r.method), []).append(r)
    out = []
    for (n, method), rs in sorted(groups.items(), key=lambda kv: (kv[0][0], METHODS.index(kv[0][1]))):
        values = [r.value for r in rs]
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        gaps = [r.gap_pct for r in rs if r.gap_pct is not None]
        out.append(
            SummaryRow(
                n,
                method,
                len(rs),
                statistics.fmean(values),
                std,
                statistics.fmean(r.time_ms for r in rs),
                statistics.fmean(gaps) if gaps else None,
            )
        )
    return out


def run_bench(
    profile: str | Profile,
    sizes: list[int],
    reps: int,
    methods: list[str],
    base_seed: int = 0,
    options: BenchOptions | None = None,
) -> BenchReport:
    options = options or BenchOptions()
    profile = Profile(profile).value
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ValueError(f"unknown methods: {', '.join(bad)}")
    if "algoA" in methods and not options.unit_weights:
        raise MethodUnavailable("algoA needs unit-weight instances (enable unit_weights)")
    methods = sorted(methods, key=METHODS.index)
    tasks = [(profile, n, base_seed + rep, tuple(methods), options) for n in sizes for rep in range(reps)]
    workers = min(worker_count(options.workers), len(tasks)) if tasks else 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_instance, tasks))
    else:
        chunks = [_run_instance(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    return BenchReport(rows, summarize(rows))
