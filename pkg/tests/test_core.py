import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import instance_and_schedule, instances, random_instance, random_schedule
from regsched.core import (
    Instance,
    Job,
    Scenario,
    Schedule,
    canonicalize,
    dumps,
    evaluate,
    load_instance,
    load_schedule,
    make_instance,
    save_instance,
    save_schedule,
    validate_and_normalize,
)
from regsched.errors import (
    DuplicateJobId,
    EmptyInstance,
    InstanceError,
    InvalidInterval,
    InvalidScenario,
    MismatchedInstance,
    NonPositiveWeight,
)
from regsched.regret import max_regret


class TestNormalize:
    def test_clamps_to_n(self):
        inst = make_instance([(1, 2, 7), (1, 1, 1), (1, 1, 1)])
        out = validate_and_normalize(inst)
        assert (out.jobs[0].due_lo, out.jobs[0].due_hi) == (2, 3)

    def test_low_bound_zero_rejected(self):
        with pytest.raises(InvalidInterval):
            validate_and_normalize(make_instance([(1, 0, 2)]))

    def test_reversed_interval_rejected(self):
        with pytest.raises(InvalidInterval):
            validate_and_normalize(make_instance([(1, 3, 2), (1, 1, 1), (1, 1, 1)]))

    def test_idempotent(self, e1):
        assert validate_and_normalize(e1) is e1

    def test_bad_weight(self):
        with pytest.raises(NonPositiveWeight):
            validate_and_normalize(make_instance([(0, 1, 1)]))

    def test_duplicate_id(self):
        with pytest.raises(DuplicateJobId):
            validate_and_normalize(Instance((Job(1, 1, 1, 1), Job(1, 2, 1, 1))))

    def test_empty(self):
        with pytest.raises(EmptyInstance):
            validate_and_normalize(Instance(()))

    def test_errors_are_value_errors(self):
        assert issubclass(InvalidInterval, InstanceError)
        assert issubclass(InstanceError, ValueError)

    @given(instances(max_lo=12, max_width=10))
    def test_normalized_bounds(self, inst):
        assert all(1 <= j.due_lo <= j.due_hi <= inst.n for j in inst.jobs)
        assert validate_and_normalize(inst) == inst


class TestEvaluate:
    def test_e1(self, e1):
        ev = evaluate(Schedule((1, 2)), Scenario(e1, (1, 1)))
        assert ev.objective == 5
        assert ev.late_ids == {2}
        assert ev.ontime_ids == {1}

    def test_single_job(self):
        inst = make_instance([(7, 1, 1)])
        assert evaluate(Schedule((1,)), Scenario(inst, (1,))).objective == 0

    def test_all_dues_one(self):
        inst = make_instance([(1, 1, 1), (2, 1, 1), (3, 1, 1)])
        assert evaluate(Schedule((3, 2, 1)), Scenario(inst, (1, 1, 1))).objective == 3

    def test_scenario_out_of_box(self, e1):
        with pytest.raises(InvalidScenario):
            Scenario(e1, (1, 3))
        with pytest.raises(InvalidScenario):
            Scenario(e1, (1,))

    def test_mismatched_schedule(self, e1):
        with pytest.raises(MismatchedInstance):
            evaluate(Schedule((1, 3)), Scenario(e1, (1, 1)))
        with pytest.raises(MismatchedInstance):
            evaluate(Schedule((1,)), Scenario(e1, (1, 1)))

    @given(instance_and_schedule(max_n=7), st.randoms(use_true_random=False))
    def test_partition_and_range(self, pair, rnd):
        inst, sched = pair
        sc = Scenario(inst, tuple(rnd.randint(j.due_lo, j.due_hi) for j in inst.jobs))
        ev = evaluate(sched, sc)
        assert 0 <= ev.objective <= inst.total_weight
        assert ev.late_ids | ev.ontime_ids == set(inst.ids)
        assert not ev.late_ids & ev.ontime_ids
        assert ev.objective + sum(inst.job(i).weight for i in ev.ontime_ids) == inst.total_weight
        assert sched.order[0] in ev.ontime_ids


class TestCanonicalize:
    def test_moves_ontime_job_first(self):
        inst = make_instance([(1, 3, 3), (1, 1, 1), (1, 2, 2)])
        sc = Scenario(inst, (3, 1, 2))
        # only job 1 is on time here, so the order is already canonical
        sched = Schedule((1, 2, 3))
        out = canonicalize(sched, sc)
        assert out == Schedule((1, 2, 3))
        sched = Schedule((3, 1, 2))
        out = canonicalize(sched, sc)
        # on time: job 3 (slot 0 < 2) and job 1 (slot 1 < 3), EDD puts job 3 first
        assert out == Schedule((3, 1, 2))
        assert evaluate(out, sc).objective == evaluate(sched, sc).objective == 1

    def test_example_late_then_ontime(self):
        inst = make_instance([(4, 1, 1), (2, 2, 2)])
        sc = Scenario(inst, (1, 2))
        # slot 0: job 2 (on time), slot 1: job 1 late -> already canonical
        assert canonicalize(Schedule((2, 1)), sc) == Schedule((2, 1))

    def test_single(self):
        inst = make_instance([(1, 1, 1)])
        assert canonicalize(Schedule((1,)), Scenario(inst, (1,))) == Schedule((1,))

    @given(instance_and_schedule(max_n=7), st.randoms(use_true_random=False))
    def test_contract(self, pair, rnd):
        inst, sched = pair
        sc = Scenario(inst, tuple(rnd.randint(j.due_lo, j.due_hi) for j in inst.jobs))
        before = evaluate(sched, sc)
        out = canonicalize(sched, sc)
        after = evaluate(out, sc)
        assert after.objective == before.objective
        assert after.ontime_ids >= before.ontime_ids
        prefix = out.order[: len(after.ontime_ids)]
        assert set(prefix) == after.ontime_ids
        dues = [sc.due_of(i) for i in prefix]
        assert dues == sorted(dues)
        assert canonicalize(out, sc) == out


class TestFiles:
    def test_round_trip_bytes(self, tmp_path, e1):
        p = tmp_path / "e1.json"
        save_instance(e1, p)
        first = p.read_bytes()
        again = load_instance(p)
        assert again == e1
        save_instance(again, p)
        assert p.read_bytes() == first
        data = json.loads(first)
        assert data == {"name": "E1", "jobs": [
            {"id": 1, "w": 3, "d_lo": 1, "d_hi": 1},
            {"id": 2, "w": 5, "d_lo": 1, "d_hi": 2},
        ]}

    def test_schedule_round_trip(self, tmp_path):
        p = tmp_path / "s.json"
        save_schedule(Schedule((2, 1, 3)), p)
        first = p.read_bytes()
        assert load_schedule(p) == Schedule((2, 1, 3))
        save_schedule(load_schedule(p), p)
        assert p.read_bytes() == first
        assert json.loads(first) == {"order": [2, 1, 3]}

    def test_missing_field_named(self):
        with pytest.raises(InstanceError, match="d_hi"):
            Instance.from_dict({"jobs": [{"id": 1, "w": 1, "d_lo": 1}]})
        with pytest.raises(InstanceError, match=r"jobs\[0\]\.w"):
            Instance.from_dict({"jobs": [{"id": 1, "w": "x", "d_lo": 1, "d_hi": 1}]})

    def test_dumps_stable(self, e1):
        assert dumps(e1.to_dict()) == dumps(Instance.from_dict(e1.to_dict()).to_dict())


def test_normalization_keeps_regret():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(1, 7)
        jobs = []
        for i in range(n):
            lo = rng.randint(1, n + 3)
            jobs.append(Job(i + 1, rng.randint(1, 50), lo, lo + rng.randint(0, 5)))
        raw = Instance(tuple(jobs))
        norm = validate_and_normalize(raw)
        sched = random_schedule(rng, norm)
        # regret on the raw instance, computed by brute force over its (unclamped) box
        import itertools

        from regsched.nominal import solve_nominal

        def regret(dues):
            start = sched.start
            late = sum(j.weight for j, d in zip(raw.jobs, dues) if start[j.id] >= d)
            return late - solve_nominal(list(dues), raw.weights, raw.ids).f_star

        raw_z = max(regret(d) for d in itertools.product(*[range(j.due_lo, j.due_hi + 1) for j in raw.jobs]))
        assert raw_z == max_regret(sched, norm).regret


def test_random_instance_helper_is_normalized():
    inst = random_instance(random.Random(0), 5)
    assert inst.is_normalized
