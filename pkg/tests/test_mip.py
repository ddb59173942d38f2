import random
import re

import highspy
import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from conftest import random_instance, random_schedule
from regsched.bnb import certify
from regsched.core import Schedule, make_instance
from regsched.errors import FractionalSolution, UnnormalizedInstance
from regsched.lp import solve_lp
from regsched.mip import build_model, export_lp, extract_schedule, x_index
from regsched.nominal import solve_nominal
from regsched.oracle import brute_force_min_regret
from regsched.regret import max_regret, worst_case_scenario


def _milp(model, lb=None, ub=None):
    """Solve a LinearModel as a MIP with scipy (HiGHS); returns (objective, x)."""
    A = model.A
    lo = np.where([s == "<=" for s in model.senses], -np.inf, model.rhs)
    hi = np.where([s == ">=" for s in model.senses], np.inf, model.rhs)
    res = milp(
        model.c,
        constraints=LinearConstraint(A, lo, hi),
        integrality=model.integrality.astype(int),
        bounds=Bounds(model.lb if lb is None else lb, model.ub if ub is None else ub),
    )
    assert res.success, res.message
    return res.fun + model.obj_constant, res.x


def _fix_x(model, schedule):
    lb, ub = model.lb.copy(), model.ub.copy()
    xi = x_index(model)
    ids = model.meta["ids"]
    for t, job_id in enumerate(schedule.order):
        row = xi[ids.index(job_id)]
        lb[row] = ub[row] = 0.0
        lb[row[t]] = ub[row[t]] = 1.0
    return lb, ub


def test_counts(e1):
    m = build_model(e1)
    assert m.num_vars == 22
    assert m.obj_constant == -8
    assert build_model(make_instance([(1, 1, 1)] * 3)).num_vars == 45
    for n in range(1, 7):
        assert build_model(make_instance([(1, 1, n)] * n)).num_vars == 4 * n * n + 3 * n


def test_names_unique_and_declared(e1):
    for tight in (False, True):
        m = build_model(make_instance([(2, 1, 3), (1, 2, 2), (4, 1, 1)]), tight=tight)
        names = [v.name for v in m.variables]
        assert len(set(names)) == len(names)
        for con in m.constraints:
            assert all(0 <= j < m.num_vars for j, _ in con.coeffs)


def test_single_job_value_zero():
    val, _ = _milp(build_model(make_instance([(4, 1, 1)])))
    assert val == pytest.approx(0)


def test_unnormalized_rejected():
    with pytest.raises(UnnormalizedInstance):
        build_model(make_instance([(1, 1, 4), (1, 1, 1)]))


def test_extract_identity_and_fractional():
    inst = make_instance([(1, 1, 2), (2, 1, 3), (3, 2, 3)])
    m = build_model(inst)
    v = np.zeros(m.num_vars)
    for k in inst.ids:
        v[m.index[f"x_{k}_{k - 1}"]] = 1.0
    assert extract_schedule(m, v) == Schedule((1, 2, 3))
    v[m.index["x_1_0"]] = 0.5
    v[m.index["x_1_1"]] = 0.5
    with pytest.raises(FractionalSolution):
        extract_schedule(m, v)


def test_e1_optimum_and_extraction(e1):
    m = build_model(e1)
    val, x = _milp(m)
    assert round(val) == 2
    sched = extract_schedule(m, x)
    assert sched == Schedule((1, 2))
    assert max_regret(sched, e1).regret == 2
    cert = certify(m, sched)
    assert cert.objective == pytest.approx(2)
    assert cert.schedule == sched


def test_mip_matches_oracle():
    rng = random.Random(21)
    for _ in range(30):
        inst = random_instance(rng, rng.randint(1, 7), max_width=5)
        opt = brute_force_min_regret(inst).optimum
        for tight in (False, True):
            m = build_model(inst, tight=tight)
            val, x = _milp(m)
            assert round(val) == opt
            assert max_regret(extract_schedule(m, x), inst).regret == opt


def test_fixed_x_forces_worst_case_due():
    rng = random.Random(13)
    for _ in range(30):
        inst = random_instance(rng, rng.randint(1, 7), max_width=5)
        sched = random_schedule(rng, inst)
        rep = max_regret(sched, inst)
        for tight in (False, True):
            m = build_model(inst, tight=tight)
            lb, ub = _fix_x(m, sched)
            res = solve_lp(m, lb=lb, ub=ub, backend="highs")
            worst = worst_case_scenario(sched, inst)
            for job in inst.jobs:
                d = worst.due_of(job.id)
                assert res.x[m.index[f"del_{job.id}_{d}"]] == pytest.approx(1.0, abs=1e-6)
            # with all binaries left integer, y marks exactly the late jobs
            val, x = _milp(m, lb, ub)
            assert round(val) == rep.regret
            start = sched.start
            for job in inst.jobs:
                late = start[job.id] >= worst.due_of(job.id)
                assert round(x[m.index[f"y_{job.id}"]]) == int(late)
            # continuous block: nominal dual objective equals W - F*(S)
            n = inst.n
            dual = sum(x[m.index[f"nu_{k}"]] for k in inst.ids)
            dual += sum(j * x[m.index[f"lam_{j}"]] for j in range(1, n + 1))
            f_star = solve_nominal(list(worst.due), inst.weights, inst.ids).f_star
            assert dual == pytest.approx(inst.total_weight - f_star, abs=1e-6)


def test_export_deterministic_and_sections(e1):
    m = build_model(e1)
    a = export_lp(m)
    b = export_lp(build_model(e1))
    assert a.encode() == b.encode()
    heads = [line for line in a.splitlines() if not line.startswith(" ")]
    assert heads[1:] == ["Minimize", "Subject To", "Bounds", "Binaries", "End"]
    assert "- 8 one" in a
    assert " one = 1" in a
    for pat in (r"\bx_1_0\b", r"\bdel_2_2\b", r"\by_1\b", r"\bD_1_2\b", r"\bnu_2\b", r"\blam_2\b", r"\bz_2_1\b"):
        assert re.search(pat, a)


def test_export_read_by_highs(tmp_path, e1):
    path = tmp_path / "e1.lp"
    path.write_text(export_lp(build_model(e1)))
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(str(path))
    h.run()
    assert h.getInfo().objective_function_value == pytest.approx(2)


def test_export_tight_read_by_highs(tmp_path):
    rng = random.Random(4)
    inst = random_instance(rng, 5)
    path = tmp_path / "t.lp"
    path.write_text(export_lp(build_model(inst, tight=True)))
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(str(path))
    h.run()
    assert round(h.getInfo().objective_function_value) == brute_force_min_regret(inst).optimum
