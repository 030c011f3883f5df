"""Second-stage values: single LPs, dual vertices, and batched HiGHS solves."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..lp import LinearProgram, LpStatus, VertexList, solve_lp
from .problem import TwoStageProblem


class RecourseInfeasibleError(RuntimeError):
    """Second stage infeasible: relatively complete recourse (A1) fails."""


class RecourseUnboundedError(RuntimeError):
    """Second stage unbounded: dual feasibility (A2) fails."""


def _raise_for(status, where: str):
    if status is LpStatus.INFEASIBLE:
        raise RecourseInfeasibleError(f"(A1) violated: second stage infeasible {where}")
    if status is LpStatus.UNBOUNDED:
        raise RecourseUnboundedError(f"(A2) violated: second stage unbounded {where}")
    if status is LpStatus.STALLED:
        raise RuntimeError(f"simplex stalled {where}")


def second_stage_lp(problem: TwoStageProblem, x, xi) -> LinearProgram:
    return LinearProgram(problem.q, problem.W, problem.rhs(x, xi))


def eval_recourse_lp(problem: TwoStageProblem, x, xi, check_x: bool = True) -> float:
    """Phi(x, xi) via the dense simplex."""
    x = problem.check_x(x) if check_x else np.asarray(x, dtype=np.float64)
    sol = solve_lp(second_stage_lp(problem, x, xi))
    _raise_for(sol.status, f"at xi={np.asarray(xi).tolist()}")
    return sol.value


def eval_recourse_dual(vertices, x, xi, h_bar, T):
    """max_j <v^j, h(xi) - T x> and the (lowest) maximizing vertex index.

    ``xi`` may be one vector or an (N, d) array.
    """
    V = vertices.vertices if isinstance(vertices, VertexList) else np.atleast_2d(vertices)
    if V.shape[0] == 0:
        raise ValueError("vertex list is empty")
    xi = np.asarray(xi, dtype=np.float64)
    h_bar = np.ravel(np.asarray(h_bar, dtype=np.float64))
    tail = np.broadcast_to(h_bar, xi.shape[:-1] + (h_bar.size,))
    t = np.concatenate([xi, tail], axis=-1) - np.asarray(T) @ np.asarray(x, dtype=np.float64)
    vals = t @ V.T
    j = np.argmax(vals, axis=-1)
    best = np.take_along_axis(vals, np.expand_dims(j, -1), -1)[..., 0]
    if best.ndim == 0:
        return float(best), int(j)
    return best, j


class BatchRecourse:
    """Phi(x, xi^j) for many scenarios with a warm-started HiGHS dual simplex.

    Only the right-hand side changes between scenarios, so the previous
    optimal basis stays dual feasible.  Scenarios are visited in order of
    their projection on the leading principal direction of the batch,
    which keeps consecutive right-hand sides close.
    """

    def __init__(self, problem: TwoStageProblem):
        import highspy

        self.problem = problem
        h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("presolve", "off")
        h.setOptionValue("primal_feasibility_tolerance", 1e-9)
        h.setOptionValue("dual_feasibility_tolerance", 1e-9)
        W = sp.csc_matrix(problem.W)
        lp = highspy.HighsLp()
        lp.num_col_ = problem.mbar
        lp.num_row_ = problem.r
        lp.col_cost_ = np.asarray(problem.q)
        lp.col_lower_ = np.zeros(problem.mbar)
        lp.col_upper_ = np.full(problem.mbar, highspy.kHighsInf)
        lp.row_lower_ = np.zeros(problem.r)
        lp.row_upper_ = np.zeros(problem.r)
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = W.indptr
        lp.a_matrix_.index_ = W.indices
        lp.a_matrix_.value_ = W.data
        h.passModel(lp)
        self._h = h
        self._rows = np.arange(problem.r, dtype=np.int32)
        self._optimal = highspy.HighsModelStatus.kOptimal
        self._infeasible = highspy.HighsModelStatus.kInfeasible
        self._unbounded = (highspy.HighsModelStatus.kUnbounded,
                           highspy.HighsModelStatus.kUnboundedOrInfeasible)

    @staticmethod
    def visiting_order(rhs: np.ndarray) -> np.ndarray:
        if rhs.shape[0] < 3:
            return np.arange(rhs.shape[0])
        sub = rhs[:: max(1, rhs.shape[0] // 512)]
        centered = sub - sub.mean(axis=0)
        direction = np.linalg.svd(centered, full_matrices=False)[2][0]
        return np.argsort(rhs @ direction, kind="stable")

    def solve(self, x, xis, duals: bool = False):
        p = self.problem
        rhs = p.rhs(x, np.atleast_2d(xis))
        n = rhs.shape[0]
        values = np.empty(n)
        pis = np.empty((n, p.r)) if duals else None
        h = self._h
        for k in self.visiting_order(rhs):
            b = rhs[k]
            h.changeRowsBounds(p.r, self._rows, b, b)
            h.run()
            status = h.getModelStatus()
            if status != self._optimal:
                # retry cold before declaring failure
                h.clearSolver()
                h.run()
                status = h.getModelStatus()
            if status == self._infeasible:
                raise RecourseInfeasibleError(f"(A1) violated: second stage infeasible for scenario {k}")
            if status in self._unbounded:
                raise RecourseUnboundedError(f"(A2) violated: second stage unbounded for scenario {k}")
            if status != self._optimal:
                raise RuntimeError(f"HiGHS status {status} for scenario {k}")
            values[k] = h.getInfo().objective_function_value
            if duals:
                pis[k] = h.getSolution().row_dual
        return (values, pis) if duals else values

    def values(self, x, xis) -> np.ndarray:
        return self.solve(x, xis)
