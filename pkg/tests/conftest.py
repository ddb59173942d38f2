import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from regsched.core import Instance, Job, Schedule, make_instance, validate_and_normalize

settings.register_profile(
    "default", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def e1() -> Instance:
    return make_instance([(3, 1, 1), (5, 1, 2)], name="E1")


@st.composite
def instances(draw, min_n=1, max_n=6, max_width=4, max_weight=100, unit=False, max_lo=None):
    n = draw(st.integers(min_n, max_n))
    jobs = []
    for i in range(n):
        w = 1 if unit else draw(st.integers(1, max_weight))
        lo = draw(st.integers(1, max_lo or n + 1))
        width = draw(st.integers(0, max_width))
        jobs.append(Job(i + 1, w, lo, lo + width))
    return validate_and_normalize(Instance(tuple(jobs)))


@st.composite
def instance_and_schedule(draw, **kw):
    inst = draw(instances(**kw))
    order = draw(st.permutations(list(inst.ids)))
    return inst, Schedule(tuple(order))


def random_instance(rng: random.Random, n: int, max_width: int = 4, unit: bool = False) -> Instance:
    jobs = []
    for i in range(n):
        lo = rng.randint(1, n)
        jobs.append(Job(i + 1, 1 if unit else rng.randint(1, 100), lo, lo + rng.randint(0, max_width)))
    return validate_and_normalize(Instance(tuple(jobs)))


def random_schedule(rng: random.Random, inst: Instance) -> Schedule:
    order = list(inst.ids)
    rng.shuffle(order)
    return Schedule(tuple(order))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
