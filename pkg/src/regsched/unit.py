"""Polynomial exact algorithm for the unit-weight case."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Instance, Schedule
from .errors import NonUnitWeights, UnnormalizedInstance
from .nominal import OntimeSet, is_independent
from .regret import max_regret


@dataclass(frozen=True)
class AlgoAResult:
    schedule: Schedule
    ontime_set: OntimeSet
    regret: int


PLACEMENTS = ("late", "prefix")


def solve_unit(instance: Instance, placement: str = "late") -> AlgoAResult:
    """Robust optimal schedule when every weight is 1.

    The on-time set ``I`` is the greedy scan by nondecreasing upper bound, kept
    independent against the lower bounds.  The remaining jobs run in nonincreasing
    upper bound order.  ``placement`` decides where ``I`` goes:

    ``"late"`` (default) puts every job of ``I`` in the latest free slot below its
    lower bound and lets the other jobs fill the gaps front to back, so late jobs
    start as early as possible and get small worst-case due-dates.
    ``"prefix"`` packs ``I`` into slots ``0..|I|-1``.  It is not always optimal:
    for ``[1,1], [1,2], [3,3]`` it yields regret 1 where ``(1, 2, 3)`` has regret 0.
    """
    if placement not in PLACEMENTS:
        raise ValueError(f"placement must be one of {PLACEMENTS}, got {placement!r}")
    if not instance.unit_weight:
        raise NonUnitWeights("the unit-weight algorithm requires every weight to equal 1")
    if not instance.is_normalized:
        raise UnnormalizedInstance("solve_unit expects a normalized instance")
    jobs = instance.jobs
    # step 1: scan by upper bound and keep what stays schedulable against the lower bounds
    chosen = []
    lows: list[int] = []
    for job in sorted(jobs, key=lambda j: (j.due_hi, j.id)):
        if is_independent(lows + [job.due_lo]):
            chosen.append(job)
            lows.append(job.due_lo)
    picked = {j.id for j in chosen}
    tail = sorted((j for j in jobs if j.id not in picked), key=lambda j: (-j.due_hi, j.id))
    if placement == "prefix":
        head = sorted(chosen, key=lambda j: (j.due_lo, j.id))
        slots = [j.id for j in head + tail]
    else:
        slots = [None] * instance.n
        for job in sorted(chosen, key=lambda j: (-j.due_lo, -j.id)):
            t = job.due_lo - 1
            while t >= 0 and slots[t] is not None:
                t -= 1
            assert t >= 0, "selected set is not schedulable against its lower bounds"
            slots[t] = job.id
        rest = iter(j.id for j in tail)
        slots = [next(rest) if s is None else s for s in slots]
    schedule = Schedule(tuple(slots))
    start = schedule.start
    for job in chosen:
        assert start[job.id] < job.due_lo, "selected job must start before its lower due bound"
    ontime = OntimeSet(frozenset(picked), len(picked))
    return AlgoAResult(schedule, ontime, max_regret(schedule, instance).regret)


def late_order_check(schedule: Schedule, instance: Instance) -> bool:
    """True iff the jobs starting at or after their lower due bound run in nonincreasing upper bound."""
    his = [instance.job(i).due_hi for t, i in enumerate(schedule.order) if t >= instance.job(i).due_lo]
    return all(a >= b for a, b in zip(his, his[1:]))
