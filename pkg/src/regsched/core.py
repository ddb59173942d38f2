"""Problem data model and schedule evaluation.

Jobs have unit processing time.  A schedule lists job ids by start slot, so the
job at list position ``t`` starts at time ``t`` and completes at ``t + 1``.  A job
is on-time under due-date ``d`` iff its start slot is strictly below ``d``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateJobId,
    EmptyInstance,
    InstanceError,
    InvalidInterval,
    InvalidSchedule,
    InvalidScenario,
    MismatchedInstance,
    NonPositiveWeight,
)


@dataclass(frozen=True)
class Job:
    id: int
    weight: int
    due_lo: int
    due_hi: int

    @property
    def is_certain(self) -> bool:
        return self.due_lo == self.due_hi


@dataclass(frozen=True)
class Instance:
    jobs: tuple[Job, ...]
    name: str = ""
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))

    @property
    def n(self) -> int:
        return len(self.jobs)

    @cached_property
    def ids(self) -> tuple[int, ...]:
        return tuple(j.id for j in self.jobs)

    @cached_property
    def position(self) -> dict[int, int]:
        """Map job id to its index in ``jobs``."""
        return {j.id: i for i, j in enumerate(self.jobs)}

    @cached_property
    def weights(self) -> tuple[int, ...]:
        return tuple(j.weight for j in self.jobs)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def due_lo(self) -> tuple[int, ...]:
        return tuple(j.due_lo for j in self.jobs)

    @property
    def due_hi(self) -> tuple[int, ...]:
        return tuple(j.due_hi for j in self.jobs)

    @property
    def is_normalized(self) -> bool:
        return all(j.due_hi <= self.n for j in self.jobs)

    @property
    def is_certain(self) -> bool:
        return all(j.is_certain for j in self.jobs)

    @property
    def unit_weight(self) -> bool:
        return all(j.weight == 1 for j in self.jobs)

    def job(self, job_id: int) -> Job:
        return self.jobs[self.position[job_id]]

    def subinstance(self, ids: Iterable[int], name: str | None = None) -> "Instance":
        """Restrict to the given job ids (in instance order) and renormalize."""
        keep = set(ids)
        jobs = tuple(j for j in self.jobs if j.id in keep)
        return validate_and_normalize(Instance(jobs, name if name is not None else self.name))

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "jobs": [{"id": j.id, "w": j.weight, "d_lo": j.due_lo, "d_hi": j.due_hi} for j in self.jobs],
        }
        if self.meta:
            data["meta"] = dict(self.meta)
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "Instance":
        if not isinstance(data, Mapping) or "jobs" not in data:
            raise InstanceError("instance: missing field 'jobs'")
        jobs = []
        for pos, raw in enumerate(data["jobs"]):
            for key in ("id", "w", "d_lo", "d_hi"):
                if key not in raw:
                    raise InstanceError(f"jobs[{pos}]: missing field '{key}'")
                if not isinstance(raw[key], int) or isinstance(raw[key], bool):
                    raise InstanceError(f"jobs[{pos}].{key}: expected integer, got {raw[key]!r}")
            jobs.append(Job(raw["id"], raw["w"], raw["d_lo"], raw["d_hi"]))
        name = data.get("name", "")
        if not isinstance(name, str):
            raise InstanceError("instance: field 'name' must be a string")
        return cls(tuple(jobs), name, dict(data.get("meta", {})))


@dataclass(frozen=True)
class Scenario:
    """One integer due-date per job, aligned with ``instance.jobs``."""

    instance: Instance
    due: tuple[int, ...]

    def __post_init__(self):
        due = tuple(int(d) for d in self.due)
        object.__setattr__(self, "due", due)
        if len(due) != self.instance.n:
            raise InvalidScenario(f"scenario has {len(due)} due-dates for {self.instance.n} jobs")
        for job, d in zip(self.instance.jobs, due):
            if not job.due_lo <= d <= job.due_hi:
                raise InvalidScenario(f"job {job.id}: due {d} outside [{job.due_lo}, {job.due_hi}]")

    def due_of(self, job_id: int) -> int:
        return self.due[self.instance.position[job_id]]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.instance.ids, self.due))


@dataclass(frozen=True)
class Schedule:
    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))

    def __len__(self) -> int:
        return len(self.order)

    @cached_property
    def start(self) -> dict[int, int]:
        """Start slot of every job (the inverse permutation)."""
        return {job_id: t for t, job_id in enumerate(self.order)}

    def completion(self, job_id: int) -> int:
        return self.start[job_id] + 1

    def check(self, instance: Instance) -> None:
        if len(self.order) != instance.n or set(self.order) != set(instance.ids):
            raise MismatchedInstance(
                f"schedule {list(self.order)} is not a permutation of job ids {list(instance.ids)}"
            )

    def to_dict(self) -> dict:
        return {"order": list(self.order)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Schedule":
        if not isinstance(data, Mapping) or "order" not in data:
            raise InvalidSchedule("schedule: missing field 'order'")
        order = data["order"]
        if not isinstance(order, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in order):
            raise InvalidSchedule("schedule.order: expected a list of integer job ids")
        if len(set(order)) != len(order):
            raise InvalidSchedule("schedule.order: repeated job id")
        return cls(tuple(order))


@dataclass(frozen=True)
class Evaluation:
    objective: int
    late_ids: frozenset[int]
    ontime_ids: frozenset[int]


def validate_and_normalize(instance: Instance) -> Instance:
    """Check the instance and clamp due-date bounds to ``n``.

    No completion time exceeds ``n``, so any due-date above ``n`` behaves like ``n``
    and the clamped instance has the same regret for every schedule.
    """
    if instance.n == 0:
        raise EmptyInstance("instance has no jobs")
    seen: set[int] = set()
    for job in instance.jobs:
        if job.id in seen:
            raise DuplicateJobId(f"job id {job.id} appears more than once")
        seen.add(job.id)
        if job.id < 1:
            raise InstanceError(f"job {job.id}: id must be >= 1")
        if job.weight < 1:
            raise NonPositiveWeight(f"job {job.id}: weight {job.weight} must be >= 1")
        if job.due_lo < 1:
            raise InvalidInterval(f"job {job.id}: d_lo {job.due_lo} must be >= 1")
        if job.due_lo > job.due_hi:
            raise InvalidInterval(f"job {job.id}: d_lo {job.due_lo} exceeds d_hi {job.due_hi}")
    n = instance.n
    if instance.is_normalized:
        return instance
    jobs = tuple(Job(j.id, j.weight, min(j.due_lo, n), min(j.due_hi, n)) for j in instance.jobs)
    return Instance(jobs, instance.name, instance.meta)


def _check_pair(schedule: Schedule, scenario: Scenario) -> None:
    schedule.check(scenario.instance)


def evaluate(schedule: Schedule, scenario: Scenario) -> Evaluation:
    _check_pair(schedule, scenario)
    inst = scenario.instance
    late, ontime = [], []
    objective = 0
    for job, due in zip(inst.jobs, scenario.due):
        if schedule.start[job.id] < due:
            ontime.append(job.id)
        else:
            late.append(job.id)
            objective += job.weight
    return Evaluation(objective, frozenset(late), frozenset(ontime))


def canonicalize(schedule: Schedule, scenario: Scenario) -> Schedule:
    """On-time jobs first in EDD order (ties by id), then late jobs.

    Late jobs keep their relative order, which keeps each of them at a slot no
    earlier than before, so the objective is unchanged.
    """
    ev = evaluate(schedule, scenario)
    ontime = sorted(ev.ontime_ids, key=lambda i: (scenario.due_of(i), i))
    late = [i for i in schedule.order if i in ev.late_ids]
    return Schedule(tuple(ontime + late))


# -- file helpers --------------------------------------------------------------


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def load_instance(path: str | Path) -> Instance:
    with open(path) as fh:
        return Instance.from_dict(json.load(fh))


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(instance.to_dict()))


def load_schedule(path: str | Path) -> Schedule:
    with open(path) as fh:
        return Schedule.from_dict(json.load(fh))


def save_schedule(schedule: Schedule, path: str | Path) -> None:
    Path(path).write_text(dumps(schedule.to_dict()))


def make_instance(rows: Sequence[tuple[int, int, int]], name: str = "") -> Instance:
    """Build an instance from ``(weight, d_lo, d_hi)`` rows with ids ``1..n``."""
    return Instance(tuple(Job(i + 1, w, lo, hi) for i, (w, lo, hi) in enumerate(rows)), name)
