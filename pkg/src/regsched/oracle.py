"""Exhaustive ground-truth solvers.

Nothing here calls into the nominal, regret or solver modules.  The worst-case rule
and the matroid greedy are re-implemented over numpy arrays so that a bug in the
production code path cannot hide itself in the tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import Instance, Schedule
from .errors import TooLarge

MAX_N = 10
MAX_GRID = 10**6
CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleResult:
    best_schedule: Schedule
    optimum: int
    explored: int


def _best_ontime_weight(dues: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Row-wise maximum on-time weight for a batch of scenarios.

    ``dues`` has shape (batch, n).  Jobs are offered heaviest first; a job with due
    ``d`` fits if every threshold ``t >= d`` still has spare capacity.
    """
    batch, n = dues.shape
    order = sorted(range(n), key=lambda i: (-int(weights[i]), i))
    thresholds = np.arange(1, n + 1)
    # spare[b, t-1] = t - |{selected jobs with due <= t}|
    spare = np.broadcast_to(thresholds, (batch, n)).copy()
    total = np.zeros(batch, dtype=np.int64)
    for i in order:
        covers = thresholds[None, :] >= dues[:, i : i + 1]
        fits = np.all(~covers | (spare > 0), axis=1)
        spare -= covers & fits[:, None]
        total += np.where(fits, int(weights[i]), 0)
    return total


def _arrays(instance: Instance):
    w = np.array(instance.weights, dtype=np.int64)
    lo = np.array([min(j.due_lo, instance.n) for j in instance.jobs], dtype=np.int64)
    hi = np.array([min(j.due_hi, instance.n) for j in instance.jobs], dtype=np.int64)
    return w, lo, hi


def _regret_of_starts(starts: np.ndarray, w, lo, hi) -> np.ndarray:
    """Maximum regret for a batch of schedules given as start-slot arrays."""
    worst = np.where(starts < lo, hi, np.minimum(starts, hi))
    late = np.where(starts >= worst, w, 0).sum(axis=1)
    best = _best_ontime_weight(worst, w)
    return late - (int(w.sum()) - best)


def brute_force_min_regret(instance: Instance) -> OracleResult:
    """Minimum of the maximum regret over all ``n!`` orders.

    Ties go to the lexicographically smallest order of job ids.
    """
    n = instance.n
    if n > MAX_N:
        raise TooLarge(f"oracle enumerates n! orders and is limited to n <= {MAX_N}, got n={n}")
    w, lo, hi = _arrays(instance)
    # enumerate orders over positions sorted by id so index-lex equals id-lex
    by_id = sorted(range(n), key=lambda i: instance.jobs[i].id)
    best_value = None
    best_perm = None
    perms = itertools.permutations(by_id)
    while True:
        chunk = list(itertools.islice(perms, CHUNK))
        if not chunk:
            break
        orders = np.array(chunk, dtype=np.int64)
        starts = np.empty_like(orders)
        rows = np.arange(len(orders))[:, None]
        starts[rows, orders] = np.arange(n)[None, :]
        z = _regret_of_starts(starts, w, lo, hi)
        k = int(np.argmin(z))
        # chunks arrive in lexicographic order, so the first minimum wins
        if best_value is None or z[k] < best_value:
            best_value = int(z[k])
            best_perm = chunk[k]
    order = tuple(instance.jobs[i].id for i in best_perm)
    return OracleResult(Schedule(order), best_value, math.factorial(n))


def brute_force_max_regret(schedule: Schedule, instance: Instance) -> int:
    """Largest regret of ``schedule`` over every integer scenario in the box."""
    w, lo, hi = _arrays(instance)
    size = math.prod(int(b - a + 1) for a, b in zip(lo, hi))
    if size > MAX_GRID:
        raise TooLarge(f"scenario grid has {size} points, limit is {MAX_GRID}")
    schedule.check(instance)
    pos = {job_id: t for t, job_id in enumerate(schedule.order)}
    starts = np.array([pos[j.id] for j in instance.jobs], dtype=np.int64)
    W = int(w.sum())
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    best = -1
    for s in range(0, len(grid), CHUNK):
        dues = grid[s : s + CHUNK]
        late = np.where(starts[None, :] >= dues, w, 0).sum(axis=1)
        regret = late - (W - _best_ontime_weight(dues, w))
        best = max(best, int(regret.max()))
    return best
