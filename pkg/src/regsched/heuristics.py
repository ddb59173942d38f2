"""Scenario-fixing heuristics and the block decomposition heuristic."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .core import Instance, Schedule
from .errors import InvalidBlockCount
from .gen import SplitMix64
from .nominal import solve_nominal

log = logging.getLogger(__name__)


def _fixed_scenario_schedule(instance: Instance, dues) -> Schedule:
    return solve_nominal(list(dues), instance.weights, instance.ids).schedule


def lb_heuristic(instance: Instance) -> Schedule:
    """Optimal schedule for the scenario where every due-date sits at its lower bound."""
    return _fixed_scenario_schedule(instance, instance.due_lo)


def mp_heuristic(instance: Instance) -> Schedule:
    """Optimal schedule for the interval mid-points, rounded down."""
    return _fixed_scenario_schedule(instance, [(j.due_lo + j.due_hi) // 2 for j in instance.jobs])


@dataclass(frozen=True)
class DecompOptions:
    m: int
    polish_budget: float = 300.0
    seed: int = 0


def sample_blocks(instance: Instance, m: int, seed: int) -> list[list[int]]:
    """Partition job ids into ``m`` blocks: ``m-1`` random blocks of ``n//m`` jobs plus the remainder.

    Sampling is a seeded Fisher-Yates shuffle on the SplitMix64 stream.  Blocks are
    then ordered by their smallest job id, which fixes the merge tie-break.
    """
    ids = list(instance.ids)
    rng = SplitMix64(seed)
    for i in range(len(ids) - 1, 0, -1):
        j = rng.randint(0, i)
        ids[i], ids[j] = ids[j], ids[i]
    size = len(ids) // m
    blocks = [ids[i * size:(i + 1) * size] for i in range(m - 1)]
    blocks.append(ids[(m - 1) * size:])
    return sorted((sorted(b) for b in blocks), key=lambda b: b[0])


def merge_blocks(instance: Instance, schedules: list[Schedule]) -> Schedule:
    """Repeatedly take the heaviest job among the block heads (ties: lowest block index)."""
    queues = [list(s.order) for s in schedules]
    heads = [0] * len(queues)
    merged = []
    for _ in range(instance.n):
        best = None
        for b, q in enumerate(queues):
            if heads[b] >= len(q):
                continue
            w = instance.job(q[heads[b]]).weight
            if best is None or w > best[0]:
                best = (w, b)
        _, b = best
        merged.append(queues[b][heads[b]])
        heads[b] += 1
    return Schedule(tuple(merged))


def decomposition(instance: Instance, options: DecompOptions) -> Schedule:
    from .bnb import BnbOptions, solve

    n = instance.n
    if not 2 <= options.m <= n:
        raise InvalidBlockCount(f"block count must satisfy 2 <= m <= n={n}, got {options.m}")
    if options.polish_budget < 0:
        raise ValueError("polish_budget must be >= 0")
    blocks = sample_blocks(instance, options.m, options.seed)
    schedules = []
    for b, ids in enumerate(blocks):
        sub = instance.subinstance(ids, name=f"{instance.name}_block{b}")
        res = solve(sub)
        schedules.append(res.incumbent)
        log.debug("block %d (%d jobs): regret %d, status %s", b, len(ids), res.ub, res.status.value)
    merged = merge_blocks(instance, schedules)
    if options.polish_budget <= 0:
        return merged
    return solve(instance, BnbOptions(time_limit=options.polish_budget, warm_start=merged)).incumbent
