"""Best-bound branch-and-bound over the regret MIP.

Node relaxations are solved by HiGHS with the parent's basis as warm start.  The
incumbent is always scored combinatorially with :func:`regret.max_regret`, never
taken from LP values.  All weights are integers, so a node is pruned as soon as
``ceil(bound - 1e-9) >= ub``.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Instance, Schedule
from .errors import InvalidWarmStart, MismatchedInstance, UnnormalizedInstance
from .errors import NumericalFailure
from .lp import LpStatus, WarmLp, solve_lp
from .mip import LinearModel, MipSolution, build_model, extract_schedule, x_index
from .nominal import solve_nominal
from .regret import max_regret

log = logging.getLogger(__name__)

INT_TOL = 1e-6
PRUNE_EPS = 1e-9


class BnbStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    GAP_REACHED = "GapReached"
    TIME_LIMIT = "TimeLimit"
    NODE_LIMIT = "NodeLimit"


@dataclass(frozen=True)
class BnbOptions:
    time_limit: float | None = None
    gap_tolerance: float = 0.0
    warm_start: Schedule | None = None
    node_limit: int | None = None
    formulation: str = "tight"
    branching: str = "gub"
    strong: int = 4
    rounding: bool = True

    def __post_init__(self):
        if self.gap_tolerance < 0:
            raise ValueError("gap_tolerance must be >= 0")
        if self.formulation not in ("tight", "plain"):
            raise ValueError(f"unknown formulation {self.formulation!r}")
        if self.branching not in ("gub", "variable"):
            raise ValueError(f"unknown branching rule {self.branching!r}")


@dataclass(frozen=True)
class BnbResult:
    status: BnbStatus
    incumbent: Schedule
    ub: int
    lb: float
    gap_pct: float
    nodes: int
    wall_time: float
    root_bound: float | None = None
    certificate: MipSolution | None = field(default=None, repr=False)
    log: tuple[tuple[int, float, int], ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "value": self.ub,
            "ub": self.ub,
            "lb": self.lb,
            "gap_pct": self.gap_pct,
            "nodes": self.nodes,
            "wall_time": self.wall_time,
            "root_bound": self.root_bound,
        }


def gap_pct(ub: float, lb: float) -> float:
    """Relative integrality gap ``(ub - lb) / ub * 100``; zero when ``ub <= 0``."""
    if ub <= 0:
        return 0.0
    return (ub - lb) / ub * 100.0


@dataclass(order=True)
class _Node:
    bound: float
    seq: int
    depth: int = field(compare=False)
    fixings: tuple[tuple[int, float], ...] = field(compare=False)
    x: np.ndarray = field(compare=False, repr=False)
    basis: object = field(compare=False, repr=False)


class _Search:
    def __init__(self, instance: Instance, options: BnbOptions):
        self.instance = instance
        self.options = options
        self.model: LinearModel = build_model(instance, tight=options.formulation == "tight")
        self.xi = x_index(self.model)
        self.yi = np.array([self.model.index[f"y_{k}"] for k in instance.ids])
        self.binary = np.flatnonzero(self.model.integrality)
        self.lp = WarmLp(self.model)
        self.nodes = 0
        self.lp_solves = 0
        self.seq = itertools.count()
        self.seen: set[tuple[int, ...]] = set()
        self.incumbent: Schedule | None = None
        self.ub = math.inf
        self.last_bound = math.nan

    def offer(self, schedule: Schedule) -> None:
        if schedule.order in self.seen:
            return
        self.seen.add(schedule.order)
        z = max_regret(schedule, self.instance).regret
        if z < self.ub:
            self.ub = z
            self.incumbent = schedule
            log.debug("incumbent %d after %d nodes", z, self.nodes)

    def prunable(self, bound: float) -> bool:
        if math.isinf(bound):
            return bound > 0
        return math.ceil(bound - PRUNE_EPS) >= self.ub

    def evaluate(self, fixings, basis, depth, count: bool = True) -> _Node | None:
        lb = self.model.lb.copy()
        ub = self.model.ub.copy()
        for j, v in fixings:
            lb[j] = ub[j] = v
        self.lp.set_bounds(lb, ub)
        self.lp.set_basis(basis)
        res = self.lp.solve()
        self.lp_solves += 1
        if count:
            self.nodes += 1
        if res.status is not LpStatus.OPTIMAL:
            self.last_bound = math.inf
            return None
        self.last_bound = res.objective
        x = res.x
        xv = x[self.xi]
        if self.options.rounding:
            rows, cols = linear_sum_assignment(-xv)
            order = [0] * self.instance.n
            for r, c in zip(rows, cols):
                order[c] = self.instance.ids[r]
            self.offer(Schedule(tuple(order)))
        node = _Node(res.objective, next(self.seq), depth, fixings, x, self.lp.get_basis())
        if self.is_integral(x):
            sched = Schedule(tuple(self.instance.ids[int(np.argmax(xv[:, t]))] for t in range(self.instance.n)))
            self.offer(sched)
            z = max_regret(sched, self.instance).regret
            assert res.objective >= z - 1e-6, "integral LP point below the combinatorial regret"
            return None
        if self.prunable(node.bound):
            return None
        return node

    def is_integral(self, x: np.ndarray) -> bool:
        v = x[self.binary]
        return bool(np.all(np.abs(v - np.rint(v)) <= INT_TOL))

    def branch_var(self, x: np.ndarray) -> int:
        for idx in (self.xi.ravel(), self.yi, self.binary):
            v = x[idx]
            frac = np.minimum(v - np.floor(v), np.ceil(v) - v)
            if frac.max() > INT_TOL:
                return int(idx[int(np.argmax(frac))])
        raise AssertionError("branching requested on an integral point")

    def gub_candidates(self, x: np.ndarray) -> list[tuple[int, int]]:
        """Row splits ``(r, tau)`` meaning ``t < tau`` versus ``t >= tau`` for job row ``r``.

        Splits at a job's lower due bound decide whether it is late, so those come
        first, ranked by weighted fractionality; median cuts of the remaining
        fractional rows follow.
        """
        xv = x[self.xi]
        early, other = [], []
        for r, job in enumerate(self.instance.jobs):
            row = xv[r]
            mass = row[: job.due_lo].sum()
            score = min(mass, 1.0 - mass)
            if score > INT_TOL:
                early.append((-score * job.weight, r, job.due_lo))
            elif np.any(np.abs(row - np.rint(row)) > INT_TOL):
                cum = np.cumsum(row)
                frac = np.minimum(cum, 1.0 - cum)[:-1]
                other.append((-frac.max(), r, int(np.argmax(frac)) + 1))
        return [(r, tau) for _, r, tau in sorted(early)] + [(r, tau) for _, r, tau in sorted(other)]

    def split(self, r: int, tau: int) -> list[tuple[tuple[int, float], ...]]:
        row = self.xi[r]
        n = self.instance.n
        before = tuple((int(row[t]), 0.0) for t in range(tau, n))
        after = tuple((int(row[t]), 0.0) for t in range(tau))
        return [before, after]

    def children(self, x: np.ndarray) -> list[tuple[tuple[int, float], ...]]:
        """Fixings for the two children, in exploration order."""
        if self.options.branching == "gub":
            cands = self.gub_candidates(x)
            if cands:
                return self.split(*cands[0])
        j = self.branch_var(x)
        return [((j, 1.0),), ((j, 0.0),)]

    def strong_children(self, node: _Node) -> list[_Node | None] | None:
        """Try the leading row splits and keep the one whose weaker child bound is highest.

        Returns the already evaluated children, or None when no split applies.
        """
        cands = self.gub_candidates(node.x)[: self.options.strong]
        if not cands:
            return None
        best = None
        for r, tau in cands:
            kids = []
            for fix in self.split(r, tau):
                kids.append(self.evaluate(node.fixings + fix, node.basis, node.depth + 1, count=False))
            bounds = [math.inf if k is None else k.bound for k in kids]
            key = (min(bounds), max(bounds))
            if best is None or key > best[0]:
                best = (key, kids)
            if self.prunable(key[0]):
                break
        self.nodes += 2
        return best[1]


def certify(model: LinearModel, schedule: Schedule) -> MipSolution:
    """Complete ``schedule`` to a feasible MIP point of least objective.

    The x block is fixed to the schedule and the LP picks the due-date indicators;
    those come out integral, so ``y`` is then fixed to its smallest feasible binary
    value and the continuous block is re-optimized.
    """
    ids = model.meta["ids"]
    n = model.meta["n"]
    xi = x_index(model)
    lb = model.lb.copy()
    ub = model.ub.copy()
    fixed = np.zeros((n, n))
    for t, job_id in enumerate(schedule.order):
        fixed[ids.index(job_id), t] = 1.0
    lb[xi] = ub[xi] = fixed
    first = solve_lp(model, lb=lb, ub=ub, backend="highs")
    if first.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"x-fixed relaxation is {first.status.value}")
    slots = np.arange(n)
    for r, k in enumerate(ids):
        dels = np.array([first.x[model.index[f"del_{k}_{d}"]] for d in range(1, n + 1)])
        d_val = np.rint(dels)
        assert np.max(np.abs(dels - d_val)) <= INT_TOL, "due indicators fractional with x fixed"
        start = int(slots @ fixed[r])
        due = int(np.argmax(d_val)) + 1
        for d in range(1, n + 1):
            j = model.index[f"del_{k}_{d}"]
            lb[j] = ub[j] = d_val[d - 1]
        j = model.index[f"y_{k}"]
        lb[j] = ub[j] = 1.0 if start >= due else 0.0
    second = solve_lp(model, lb=lb, ub=ub, backend="highs")
    if second.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"completed relaxation is {second.status.value}")
    values = tuple(float(v) for v in second.x)
    return MipSolution(values, second.objective, extract_schedule(model, values))


def _check_warm_start(schedule: Schedule, instance: Instance) -> None:
    try:
        schedule.check(instance)
    except MismatchedInstance as exc:
        raise InvalidWarmStart(str(exc)) from exc


def solve(instance: Instance, options: BnbOptions | None = None) -> BnbResult:
    options = options or BnbOptions()
    if not instance.is_normalized:
        raise UnnormalizedInstance("solve expects a normalized instance")
    clock = time.monotonic
    t0 = clock()
    W = instance.total_weight

    def out_of_time() -> bool:
        return options.time_limit is not None and clock() - t0 >= options.time_limit

    def out_of_nodes() -> bool:
        return options.node_limit is not None and search.nodes >= options.node_limit

    def certificate() -> MipSolution | None:
        try:
            return certify(search.model, search.incumbent)
        except (NumericalFailure, AssertionError) as exc:
            log.warning("could not certify the incumbent in the MIP: %s", exc)
            return None

    if options.warm_start is not None:
        _check_warm_start(options.warm_start, instance)
        first = options.warm_start
    else:
        first = solve_nominal(instance.due_lo, instance.weights, instance.ids).schedule

    search = _Search(instance, options)
    search.offer(first)
    lb = float(-W)
    root_bound = None
    trace: list[tuple[int, float, int]] = []

    def finish(status: BnbStatus, lower: float) -> BnbResult:
        lower = min(lower, float(search.ub))
        if status is BnbStatus.OPTIMAL:
            lower = float(search.ub)
        ub = int(search.ub)
        cert = certificate()
        return BnbResult(
            status,
            search.incumbent,
            ub,
            lower,
            gap_pct(ub, lower),
            search.nodes,
            clock() - t0,
            root_bound,
            cert,
            tuple(trace),
        )

    if out_of_time():
        return finish(BnbStatus.TIME_LIMIT, lb)
    if out_of_nodes():
        return finish(BnbStatus.NODE_LIMIT, lb)

    root = search.evaluate((), None, 0)
    root_bound = search.last_bound
    if root is None:
        # root relaxation integral or pruned by the starting incumbent
        return finish(BnbStatus.OPTIMAL, float(search.ub))
    lb = max(lb, root.bound)
    heap = [root]
    while heap:
        node = heap[0]
        lb = max(lb, node.bound)
        trace.append((search.nodes, lb, int(search.ub)))
        if search.prunable(node.bound):
            break
        if options.gap_tolerance > 0 and gap_pct(search.ub, lb) <= options.gap_tolerance:
            return finish(BnbStatus.GAP_REACHED, lb)
        if out_of_time():
            return finish(BnbStatus.TIME_LIMIT, lb)
        if out_of_nodes():
            return finish(BnbStatus.NODE_LIMIT, lb)
        heapq.heappop(heap)
        if options.strong > 0 and options.branching == "gub":
            evaluated = search.strong_children(node)
            if evaluated is not None:
                for child in evaluated:
                    if child is not None:
                        heapq.heappush(heap, child)
                if heap and search.prunable(heap[0].bound):
                    break
                continue
        kids = search.children(node.x)
        for i, fix in enumerate(kids):
            child = search.evaluate(node.fixings + fix, node.basis, node.depth + 1)
            if child is not None:
                heapq.heappush(heap, child)
            if i == 0 and out_of_time():
                # the second child was never solved; lb stays at the popped node's bound
                return finish(BnbStatus.TIME_LIMIT, lb)
        if heap and search.prunable(heap[0].bound):
            break
    return finish(BnbStatus.OPTIMAL, float(search.ub))
