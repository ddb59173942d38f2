"""Min-max regret single-machine scheduling with interval due-dates."""

from .bnb import BnbOptions, BnbResult, BnbStatus, solve
from .core import Instance, Job, Scenario, Schedule, evaluate, make_instance, validate_and_normalize
from .nominal import solve_nominal
from .regret import RegretReport, max_regret, worst_case_scenario
from .unit import solve_unit

__all__ = [
    "BnbOptions",
    "BnbResult",
    "BnbStatus",
    "Instance",
    "Job",
    "RegretReport",
    "Scenario",
    "Schedule",
    "evaluate",
    "make_instance",
    "max_regret",
    "solve",
    "solve_nominal",
    "solve_unit",
    "validate_and_normalize",
    "worst_case_scenario",
]

__version__ = "0.1.0"
