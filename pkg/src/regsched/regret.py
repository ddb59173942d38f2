"""Worst-case scenario construction and maximum regret of a schedule."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Instance, Scenario, Schedule, evaluate
from .errors import UnnormalizedInstance
from .nominal import solve_scenario


@dataclass(frozen=True)
class RegretReport:
    schedule: Schedule
    worst_scenario: Scenario
    alternative: Schedule
    f_pi: int
    f_star: int
    regret: int

    @property
    def late_at_lower_bound(self) -> frozenset[int]:
        """Jobs starting at or after their lower due bound (late in the worst case)."""
        start = self.schedule.start
        return frozenset(j.id for j in self.worst_scenario.instance.jobs if start[j.id] >= j.due_lo)

    def to_dict(self) -> dict:
        return {
            "regret": self.regret,
            "f_pi": self.f_pi,
            "f_star": self.f_star,
            "schedule": list(self.schedule.order),
            "worst_scenario": {str(k): v for k, v in self.worst_scenario.as_dict().items()},
            "alternative": list(self.alternative.order),
        }


def worst_due(start: int, due_lo: int, due_hi: int) -> int:
    if due_lo <= start < due_hi:
        return start
    return due_hi


def worst_case_scenario(schedule: Schedule, instance: Instance) -> Scenario:
    schedule.check(instance)
    start = schedule.start
    return Scenario(instance, tuple(worst_due(start[j.id], j.due_lo, j.due_hi) for j in instance.jobs))


def regret_in_scenario(schedule: Schedule, scenario: Scenario) -> int:
    f_pi = evaluate(schedule, scenario).objective
    f_star = solve_scenario(scenario).f_star
    r = f_pi - f_star
    assert r >= 0, "nominal optimum exceeded by a feasible schedule"
    return r


def max_regret(schedule: Schedule, instance: Instance) -> RegretReport:
    if not instance.is_normalized:
        raise UnnormalizedInstance("max_regret expects a normalized instance")
    worst = worst_case_scenario(schedule, instance)
    f_pi = evaluate(schedule, worst).objective
    alt = solve_scenario(worst)
    return RegretReport(schedule, worst, alt.schedule, f_pi, alt.f_star, f_pi - alt.f_star)
