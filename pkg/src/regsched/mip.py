"""Mixed-integer model of the min-max regret problem and its LP-format export.

Per job ``k`` (a job id) the model has

* ``x_k_t``   binary, job ``k`` starts at slot ``t`` (``t = 0..n-1``)
* ``del_k_d`` binary, worst-case due of ``k`` equals ``d`` (``d = 1..n``)
* ``y_k``     binary, ``k`` is late in the worst case
* ``D_k_j``   continuous, ``[worst due of k <= j]``
* ``nu_k``    dual of ``xhat_k <= 1`` in the adversary's nominal LP
* ``lam_j``   dual of the time-threshold row ``j`` of the adversary's LP
* ``z_k_j``   continuous, linearizes ``D_k_j * lam_j``

The adversary's inner maximization is replaced by its LP dual, so minimizing the
objective over all variables gives the min-max regret directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from .core import Instance, Schedule
from .errors import FractionalSolution, UnnormalizedInstance

INF = math.inf


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float = 0.0
    ub: float = INF
    integer: bool = False
    obj: float = 0.0


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[int, float], ...]
    sense: str  # "<=", "=", ">="
    rhs: float


@dataclass(frozen=True)
class LinearModel:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    sense: str = "min"
    obj_constant: float = 0.0
    name: str = ""
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    @cached_property
    def c(self) -> np.ndarray:
        return np.array([v.obj for v in self.variables], dtype=float)

    @cached_property
    def lb(self) -> np.ndarray:
        return np.array([v.lb for v in self.variables], dtype=float)

    @cached_property
    def ub(self) -> np.ndarray:
        return np.array([v.ub for v in self.variables], dtype=float)

    @cached_property
    def integrality(self) -> np.ndarray:
        return np.array([v.integer for v in self.variables], dtype=bool)

    @cached_property
    def A(self) -> sparse.csr_matrix:
        rows, cols, vals = [], [], []
        for i, con in enumerate(self.constraints):
            for j, a in con.coeffs:
                rows.append(i)
                cols.append(j)
                vals.append(a)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(self.num_constraints, self.num_vars))

    @cached_property
    def rhs(self) -> np.ndarray:
        return np.array([con.rhs for con in self.constraints], dtype=float)

    @cached_property
    def senses(self) -> tuple[str, ...]:
        return tuple(con.sense for con in self.constraints)

    def objective_value(self, values: Sequence[float]) -> float:
        return float(self.c @ np.asarray(values, dtype=float)) + self.obj_constant

    def violation(self, values: Sequence[float]) -> float:
        """Largest constraint violation of ``values`` (bounds excluded)."""
        act = self.A @ np.asarray(values, dtype=float)
        worst = 0.0
        for a, b, s in zip(act, self.rhs, self.senses):
            if s == "<=":
                worst = max(worst, a - b)
            elif s == ">=":
                worst = max(worst, b - a)
            else:
                worst = max(worst, abs(a - b))
        return worst


class ModelBuilder:
    def __init__(self, name: str = "", sense: str = "min"):
        self.name = name
        self.sense = sense
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self._names: dict[str, int] = {}
        self.obj_constant = 0.0

    def var(self, name: str, lb: float = 0.0, ub: float = INF, integer: bool = False, obj: float = 0.0) -> int:
        if name in self._names:
            raise ValueError(f"duplicate variable name {name!r}")
        self._names[name] = len(self.variables)
        self.variables.append(Variable(name, float(lb), float(ub), integer, float(obj)))
        return self._names[name]

    def binary(self, name: str, obj: float = 0.0) -> int:
        return self.var(name, 0.0, 1.0, True, obj)

    def add(self, name: str, coeffs: Mapping[int, float] | Sequence[tuple[int, float]], sense: str, rhs: float) -> None:
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[int, float] = {}
        for j, a in items:
            if not 0 <= j < len(self.variables):
                raise ValueError(f"constraint {name!r} references undeclared variable {j}")
            merged[j] = merged.get(j, 0.0) + float(a)
        row = tuple((j, a) for j, a in sorted(merged.items()) if a != 0.0)
        self.constraints.append(Constraint(name, row, sense, float(rhs)))

    def build(self, meta: Mapping[str, object] | None = None) -> LinearModel:
        return LinearModel(
            tuple(self.variables), tuple(self.constraints), self.sense, self.obj_constant, self.name, dict(meta or {})
        )


@dataclass(frozen=True)
class MipSolution:
    values: tuple[float, ...]
    objective: float
    schedule: Schedule | None = None


def build_model(instance: Instance, tight: bool = False) -> LinearModel:
    """Build the regret MIP.

    ``tight=False`` gives the plain formulation.  ``tight=True`` keeps the same
    variables and integer optimum but has a much stronger relaxation:

    * the out-of-interval links of a job are aggregated into one row,
      ``sum_{t < lo or t >= hi} x_k_t <= del_k_hi``;
    * ``y_k >= sum_{t >= lo} x_k_t`` (starting at or after the lower bound is late
      in the worst case);
    * ``lam_j <= max weight`` and ``z_k_j <= w_k D_k_j``, as no dual term needs to
      exceed the weight it covers; the rows bounding ``z`` from below are dropped
      because ``z`` only appears on the relaxed side of the cover rows;
    * the cover of job ``k`` is capped, ``sum_j z_k_j <= w_k``, and for every
      threshold ``d >= 2``, ``sum_j z_k_j <= sum_{j >= d} lam_j + w_k D_k_(d-1)``
      (a due of at least ``d`` can only be covered by duals at ``j >= d``).
    """
    if not instance.is_normalized:
        raise UnnormalizedInstance("build_model needs a normalized instance (all dues <= n)")
    n = instance.n
    W = instance.total_weight
    ids = instance.ids
    slots = range(n)
    dues = range(1, n + 1)
    b = ModelBuilder(name=instance.name or "regret")

    x = {(k, t): b.binary(f"x_{k}_{t}") for k in ids for t in slots}
    dl = {(k, d): b.binary(f"del_{k}_{d}") for k in ids for d in dues}
    y = {job.id: b.binary(f"y_{job.id}", obj=job.weight) for job in instance.jobs}
    D = {(k, j): b.var(f"D_{k}_{j}") for k in ids for j in dues}
    nu = {k: b.var(f"nu_{k}", obj=1.0) for k in ids}
    lam_cap = max(instance.weights) if tight else W
    lam = {j: b.var(f"lam_{j}", 0.0, lam_cap, obj=j) for j in dues}
    z = {(k, j): b.var(f"z_{k}_{j}") for k in ids for j in dues}
    b.obj_constant = -W

    for k in ids:
        b.add(f"assign_job_{k}", [(x[k, t], 1) for t in slots], "=", 1)
    for t in slots:
        b.add(f"assign_slot_{t}", [(x[k, t], 1) for k in ids], "=", 1)
    for k in ids:
        b.add(f"due_{k}", [(dl[k, d], 1) for d in dues], "=", 1)
    for job in instance.jobs:
        k, lo, hi = job.id, job.due_lo, job.due_hi
        outside = [t for t in slots if t < lo or t >= hi]
        if tight:
            b.add(f"wc_out_{k}", [(x[k, t], 1) for t in outside] + [(dl[k, hi], -1)], "<=", 0)
        else:
            for t in outside:
                b.add(f"wc_out_{k}_{t}", [(x[k, t], 1), (dl[k, hi], -1)], "<=", 0)
        for t in range(lo, hi):
            b.add(f"wc_in_{k}_{t}", [(x[k, t], 1), (dl[k, t], -1)], "<=", 0)
    for k in ids:
        row = [(x[k, t], t) for t in slots] + [(dl[k, d], -d) for d in dues] + [(y[k], -n)]
        b.add(f"late_{k}", row, "<=", -1)
    if tight:
        for job in instance.jobs:
            k = job.id
            b.add(f"late_lb_{k}", [(x[k, t], 1) for t in range(job.due_lo, n)] + [(y[k], -1)], "<=", 0)
    for k in ids:
        for j in dues:
            b.add(f"cum_{k}_{j}", [(D[k, j], 1)] + [(dl[k, d], -1) for d in range(1, j + 1)], "=", 0)
    for job in instance.jobs:
        k = job.id
        b.add(f"dual_{k}", [(nu[k], -1)] + [(z[k, j], -1) for j in dues], "<=", -job.weight)
    for job in instance.jobs:
        k = job.id
        cap = job.weight if tight else W
        for j in dues:
            b.add(f"lin_a_{k}_{j}", [(z[k, j], 1), (D[k, j], -cap)], "<=", 0)
            if not tight:
                b.add(f"lin_b_{k}_{j}", [(lam[j], 1), (D[k, j], W), (z[k, j], -1)], "<=", W)
            b.add(f"lin_c_{k}_{j}", [(z[k, j], 1), (lam[j], -1)], "<=", 0)
    if tight:
        for job in instance.jobs:
            k = job.id
            cover = [(z[k, j], 1) for j in dues]
            b.add(f"cover_cap_{k}", cover, "<=", job.weight)
            for d in range(2, n + 1):
                tail = [(lam[j], -1) for j in range(d, n + 1)]
                b.add(f"cover_{k}_{d}", cover + tail + [(D[k, d - 1], -job.weight)], "<=", 0)

    return b.build(meta={"ids": ids, "n": n, "W": W, "tight": tight})


def x_index(model: LinearModel) -> np.ndarray:
    """``(n, n)`` array of variable indices; row = position of job in ``ids``, column = slot."""
    ids = model.meta["ids"]
    n = model.meta["n"]
    return np.array([[model.index[f"x_{k}_{t}"] for t in range(n)] for k in ids], dtype=int)


def extract_schedule(model: LinearModel, solution: MipSolution | Sequence[float], tol: float = 1e-6) -> Schedule:
    values = np.asarray(solution.values if isinstance(solution, MipSolution) else solution, dtype=float)
    ids = model.meta["ids"]
    xv = values[x_index(model)]
    rounded = np.rint(xv)
    if np.max(np.abs(xv - rounded)) > tol:
        raise FractionalSolution("x variables are not integral")
    if not (np.all(rounded.sum(axis=0) == 1) and np.all(rounded.sum(axis=1) == 1)):
        raise FractionalSolution("x does not encode a permutation")
    order = [ids[int(np.argmax(rounded[:, t]))] for t in range(len(ids))]
    return Schedule(tuple(order))


# -- LP-format export ----------------------------------------------------------


def _num(a: float) -> str:
    if float(a).is_integer():
        return str(int(a))
    return repr(float(a))


def _terms(pairs: Sequence[tuple[float, str]]) -> list[str]:
    out = []
    for a, name in pairs:
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        coef = "" if mag == 1 else _num(mag) + " "
        out.append(f"{sign} {coef}{name}")
    if out and out[0].startswith("+ "):
        out[0] = out[0][2:]
    return out


def _wrap(head: str, tokens: list[str], tail: str = "", width: int = 100) -> list[str]:
    lines, cur = [], head
    for tok in tokens:
        if len(cur) + 1 + len(tok) > width and cur.strip():
            lines.append(cur)
            cur = "   "
        cur += " " + tok
    if tail:
        cur += " " + tail
    lines.append(cur)
    return lines


def export_lp(model: LinearModel) -> str:
    """CPLEX LP text.  The objective constant is carried by a variable ``one`` fixed to 1."""
    names = [v.name for v in model.variables]
    lines = [f"\\ Problem: {model.name}" if model.name else "\\ Problem", "Minimize" if model.sense == "min" else "Maximize"]
    obj = [(v.obj, v.name) for v in model.variables if v.obj != 0.0]
    if model.obj_constant != 0.0:
        obj.append((model.obj_constant, "one"))
    lines += _wrap(" obj:", _terms(obj))
    lines.append("Subject To")
    for con in model.constraints:
        sense = {"<=": "<=", ">=": ">=", "=": "="}[con.sense]
        lines += _wrap(f" {con.name}:", _terms([(a, names[j]) for j, a in con.coeffs]), f"{sense} {_num(con.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.integer and v.lb == 0.0 and v.ub == 1.0:
            continue
        if v.lb == 0.0 and v.ub == INF:
            continue
        lo = "-inf" if v.lb == -INF else _num(v.lb)
        hi = "+inf" if v.ub == INF else _num(v.ub)
        lines.append(f" {lo} <= {v.name} <= {hi}")
    if model.obj_constant != 0.0:
        lines.append(" one = 1")
    binaries = [v.name for v in model.variables if v.integer and v.lb == 0.0 and v.ub == 1.0]
    generals = [v.name for v in model.variables if v.integer and not (v.lb == 0.0 and v.ub == 1.0)]
    if binaries:
        lines.append("Binaries")
        lines += _wrap("", binaries)
    if generals:
        lines.append("Generals")
        lines += _wrap("", generals)
    lines.append("End")
    return "\n".join(lines) + "\n"
