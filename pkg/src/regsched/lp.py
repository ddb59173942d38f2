"""Linear programming: a dense bounded-variable primal simplex and a HiGHS wrapper.

The simplex is the reference engine (nominal LP and its dual, small relaxations).
Branch-and-bound node relaxations go through :class:`WarmLp`, which keeps a HiGHS
model alive and reoptimizes from the parent basis after bound changes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalFailure
from .mip import LinearModel, ModelBuilder

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
OPT_TOL = 1e-7


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    objective: float
    x: np.ndarray
    iterations: int


# -- nominal LP and dual -------------------------------------------------------


def build_nominal_lp(dues: Sequence[int], weights: Sequence[int]) -> LinearModel:
    """``max sum w_k xhat_k`` s.t. prefix sums over jobs in nondecreasing due order."""
    n = len(dues)
    order = sorted(range(n), key=lambda p: (dues[p], p))
    b = ModelBuilder("nominal", sense="max")
    xs = [b.var(f"xhat_{p + 1}", 0.0, 1.0, obj=weights[p]) for p in range(n)]
    for k in range(n):
        b.add(f"prefix_{k + 1}", [(xs[order[i]], 1) for i in range(k + 1)], "<=", dues[order[k]])
    return b.build()


def build_nominal_dual(dues: Sequence[int], weights: Sequence[int]) -> LinearModel:
    """``min sum nu_k + sum d_(j) lam_j`` s.t. ``w_(k) <= nu_(k) + sum_{i>=k} lam_i``.

    Indices in parentheses refer to jobs sorted by nondecreasing due.
    """
    n = len(dues)
    order = sorted(range(n), key=lambda p: (dues[p], p))
    b = ModelBuilder("nominal_dual", sense="min")
    nu = [b.var(f"nu_{p + 1}", obj=1.0) for p in range(n)]
    lam = [b.var(f"lam_{i + 1}", obj=dues[order[i]]) for i in range(n)]
    for k in range(n):
        p = order[k]
        b.add(f"cover_{p + 1}", [(nu[p], 1)] + [(lam[i], 1) for i in range(k, n)], ">=", weights[p])
    return b.build()


# -- dense bounded-variable primal simplex -------------------------------------


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, senses: Sequence[str], ub: np.ndarray):
        m, nv = A.shape
        cols = [A]
        col_ub = [ub]
        basis = np.empty(m, dtype=int)
        n_slack = sum(1 for s in senses if s != "=")
        S = np.zeros((m, n_slack))
        sign = np.ones(m)
        need_art = []
        c = 0
        slack_of = {}
        for i, s in enumerate(senses):
            if s == "=":
                continue
            S[i, c] = 1.0 if s == "<=" else -1.0
            slack_of[i] = nv + c
            c += 1
        cols.append(S)
        col_ub.append(np.full(n_slack, math.inf))
        for i in range(m):
            if i in slack_of:
                coef = S[i, slack_of[i] - nv]
                if b[i] * coef >= 0:
                    sign[i] = coef
                    basis[i] = slack_of[i]
                    continue
            if b[i] < 0:
                sign[i] = -1.0
            need_art.append(i)
        n_art = len(need_art)
        R = np.zeros((m, n_art))
        for a, i in enumerate(need_art):
            R[i, a] = sign[i]
            basis[i] = nv + n_slack + a
        cols.append(R)
        col_ub.append(np.full(n_art, math.inf))
        self.T = np.hstack(cols) * sign[:, None]
        self.beta = b * sign
        self.ub = np.concatenate(col_ub)
        self.basis = basis
        self.nv = nv
        self.n_art = n_art
        self.art_start = nv + n_slack
        self.N = self.T.shape[1]
        self.at_upper = np.zeros(self.N, dtype=bool)
        self.is_basic = np.zeros(self.N, dtype=bool)
        self.is_basic[basis] = True
        self.iterations = 0

    def values(self) -> np.ndarray:
        v = np.where(self.at_upper, self.ub, 0.0)
        v[self.basis] = self.beta
        return v

    def run(self, cost: np.ndarray, max_iter: int) -> str:
        T, basis = self.T, self.basis
        d = cost - cost[basis] @ T
        m, N = T.shape
        stall_limit = 3 * (m + N)
        best = cost @ self.values()
        since_progress = 0
        bland = False
        while True:
            if self.iterations >= max_iter:
                raise NumericalFailure(f"simplex exceeded {max_iter} iterations")
            elig_lo = (~self.is_basic) & (~self.at_upper) & (d < -OPT_TOL) & (self.ub > 0)
            elig_hi = (~self.is_basic) & self.at_upper & (d > OPT_TOL)
            elig = elig_lo | elig_hi
            if not elig.any():
                return "optimal"
            if bland:
                q = int(np.flatnonzero(elig)[0])
            else:
                score = np.where(elig, np.abs(d), -1.0)
                q = int(np.argmax(score))
            direction = -1.0 if self.at_upper[q] else 1.0
            col = T[:, q]
            alpha = direction * col
            theta = self.ub[q]
            leave = -1
            leave_to_upper = False
            dec = alpha > PIVOT_TOL
            inc = alpha < -PIVOT_TOL
            ratios = np.full(m, math.inf)
            ratios[dec] = np.maximum(self.beta[dec], 0.0) / alpha[dec]
            ub_b = self.ub[basis]
            fin = inc & np.isfinite(ub_b)
            ratios[fin] = np.maximum(ub_b[fin] - self.beta[fin], 0.0) / (-alpha[fin])
            rmin = ratios.min() if m else math.inf
            if rmin < theta:
                ties = np.flatnonzero(ratios <= rmin + 1e-12)
                leave = int(ties[np.argmin(basis[ties])])
                theta = ratios[leave]
                leave_to_upper = bool(inc[leave])
            if math.isinf(theta):
                return "unbounded"
            self.iterations += 1
            self.beta -= theta * alpha
            if leave < 0:
                self.at_upper[q] = not self.at_upper[q]
            else:
                entering_val = (self.ub[q] if self.at_upper[q] else 0.0) + direction * theta
                out = basis[leave]
                self.is_basic[out] = False
                self.at_upper[out] = leave_to_upper
                piv = T[leave, q]
                T[leave] /= piv
                rows = col.copy()
                rows[leave] = 0.0
                T -= np.outer(rows, T[leave])
                d -= d[q] * T[leave]
                basis[leave] = q
                self.is_basic[q] = True
                self.at_upper[q] = False
                self.beta[leave] = entering_val
            obj = cost @ self.values()
            if obj < best - 1e-12 * max(1.0, abs(best)):
                best = obj
                since_progress = 0
            else:
                since_progress += 1
                if since_progress > stall_limit:
                    bland = True


def _simplex(model: LinearModel, lb: np.ndarray, ub: np.ndarray) -> LpResult:
    if np.any(~np.isfinite(lb)):
        raise ValueError("simplex requires finite lower bounds")
    if np.any(ub < lb - FEAS_TOL):
        return LpResult(LpStatus.INFEASIBLE, math.nan, np.full(model.num_vars, math.nan), 0)
    sign = 1.0 if model.sense == "min" else -1.0
    c = sign * model.c
    A = model.A.toarray()
    b = model.rhs - A @ lb
    tab = _Tableau(A, b, model.senses, ub - lb)
    max_iter = 50 * (tab.T.shape[0] + tab.N) + 1000
    if tab.n_art:
        phase1 = np.zeros(tab.N)
        phase1[tab.art_start:] = 1.0
        tab.run(phase1, max_iter)
        infeas = tab.values()[tab.art_start:].sum()
        if infeas > FEAS_TOL:
            return LpResult(LpStatus.INFEASIBLE, math.nan, np.full(model.num_vars, math.nan), tab.iterations)
        tab.ub[tab.art_start:] = 0.0
    cost = np.zeros(tab.N)
    cost[: model.num_vars] = c
    status = tab.run(cost, max_iter)
    x = lb + tab.values()[: model.num_vars]
    if status == "unbounded":
        return LpResult(LpStatus.UNBOUNDED, -sign * math.inf, x, tab.iterations)
    if model.violation(x) > FEAS_TOL * max(1.0, float(np.abs(model.rhs).max(initial=0.0))):
        raise NumericalFailure("simplex solution violates constraints beyond tolerance")
    x = np.clip(x, lb, ub)
    return LpResult(LpStatus.OPTIMAL, model.objective_value(x), x, tab.iterations)


def _highs(model: LinearModel, lb: np.ndarray, ub: np.ndarray) -> LpResult:
    lp = WarmLp(model)
    lp.set_bounds(lb, ub)
    return lp.solve()


def solve_lp(
    model: LinearModel,
    relax: bool = True,
    lb: np.ndarray | None = None,
    ub: np.ndarray | None = None,
    backend: str = "simplex",
) -> LpResult:
    """Solve the LP (relaxation) of ``model``; ``lb``/``ub`` override variable bounds."""
    if not relax and model.integrality.any():
        raise ValueError("model has integer variables; pass relax=True or use the branch-and-bound solver")
    lb = model.lb.copy() if lb is None else np.asarray(lb, dtype=float)
    ub = model.ub.copy() if ub is None else np.asarray(ub, dtype=float)
    if backend == "simplex":
        return _simplex(model, lb, ub)
    if backend == "highs":
        return _highs(model, lb, ub)
    raise ValueError(f"unknown LP backend {backend!r}")


# -- persistent HiGHS model for branch-and-bound -------------------------------


class WarmLp:
    """HiGHS LP kept in memory; bounds can be changed and the basis restored."""

    def __init__(self, model: LinearModel):
        import highspy

        self._highspy = highspy
        self.model = model
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("threads", 1)
        h.setOptionValue("presolve", "off")
        inf = highspy.kHighsInf
        lp = highspy.HighsLp()
        lp.num_col_ = model.num_vars
        lp.num_row_ = model.num_constraints
        sign = 1.0 if model.sense == "min" else -1.0
        lp.col_cost_ = sign * model.c
        lp.col_lower_ = model.lb
        lp.col_upper_ = np.where(np.isinf(model.ub), inf, model.ub)
        lo = np.array([-inf if s == "<=" else r for s, r in zip(model.senses, model.rhs)])
        hi = np.array([inf if s == ">=" else r for s, r in zip(model.senses, model.rhs)])
        lp.row_lower_ = lo
        lp.row_upper_ = hi
        csc = model.A.tocsc()
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = csc.indptr
        lp.a_matrix_.index_ = csc.indices
        lp.a_matrix_.value_ = csc.data
        h.passModel(lp)
        self.h = h
        self.sign = sign
        self._inf = inf
        self._all = np.arange(model.num_vars, dtype=np.int32)

    def set_bounds(self, lb: np.ndarray, ub: np.ndarray) -> None:
        ub = np.where(np.isinf(ub), self._inf, ub)
        self.h.changeColsBounds(len(self._all), self._all, np.asarray(lb, dtype=float), ub)

    def get_basis(self):
        return self.h.getBasis()

    def set_basis(self, basis) -> None:
        if basis is not None:
            self.h.setBasis(basis)

    def solve(self) -> LpResult:
        hs = self._highspy
        self.h.run()
        status = self.h.getModelStatus()
        iters = int(self.h.getInfo().simplex_iteration_count)
        nan = np.full(self.model.num_vars, math.nan)
        if status == hs.HighsModelStatus.kOptimal:
            x = np.array(self.h.getSolution().col_value)
            return LpResult(LpStatus.OPTIMAL, self.model.objective_value(x), x, iters)
        if status == hs.HighsModelStatus.kInfeasible:
            return LpResult(LpStatus.INFEASIBLE, math.nan, nan, iters)
        if status in (hs.HighsModelStatus.kUnbounded, hs.HighsModelStatus.kUnboundedOrInfeasible):
            return LpResult(LpStatus.UNBOUNDED, -self.sign * math.inf, nan, iters)
        raise NumericalFailure(f"HiGHS returned status {self.h.modelStatusToString(status)}")
