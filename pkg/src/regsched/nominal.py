"""Deterministic problem ``1|p_i=1|sum w_i U_i`` solved by the matroid greedy."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import Scenario, Schedule


@dataclass(frozen=True)
class OntimeSet:
    ids: frozenset[int]
    total_weight: int


@dataclass(frozen=True)
class NominalSolution:
    ontime: OntimeSet
    schedule: Schedule
    f_star: int


def is_independent(dues: Sequence[int]) -> bool:
    """True iff at most ``t`` of the dues are ``<= t`` for every ``t``.

    Equivalently the k-th smallest due is at least k, which is what EDD needs to
    finish every job on time.
    """
    return all(d >= k for k, d in enumerate(sorted(dues), start=1))


def solve_nominal(
    dues: Sequence[int],
    weights: Sequence[int],
    ids: Sequence[int] | None = None,
) -> NominalSolution:
    """Maximum-weight on-time set by the greedy, heaviest first (ties: lower id)."""
    n = len(dues)
    if ids is None:
        ids = range(1, n + 1)
    ids = list(ids)
    # slack[t] = t - #{selected : due <= t}; the set stays independent iff all slack >= 0
    slack = list(range(n + 1))
    chosen: list[int] = []
    for p in sorted(range(n), key=lambda p: (-weights[p], ids[p])):
        d = min(dues[p], n)
        if min(slack[d:]) >= 1:
            for t in range(d, n + 1):
                slack[t] -= 1
            chosen.append(p)
    chosen_set = set(chosen)
    ontime_w = sum(weights[p] for p in chosen)
    ontime = sorted(chosen, key=lambda p: (dues[p], ids[p]))
    late = sorted((p for p in range(n) if p not in chosen_set), key=lambda p: ids[p])
    schedule = Schedule(tuple(ids[p] for p in ontime + late))
    return NominalSolution(
        OntimeSet(frozenset(ids[p] for p in chosen), ontime_w),
        schedule,
        sum(weights) - ontime_w,
    )


def solve_scenario(scenario: Scenario) -> NominalSolution:
    inst = scenario.instance
    return solve_nominal(scenario.due, inst.weights, inst.ids)
