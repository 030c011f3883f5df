"""Sample average approximation: extensive form and single-cut L-shaped method."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ..lp import LinearProgram, LpStatus, solve_lp
from ..recourse.evaluate import (BatchRecourse, RecourseInfeasibleError, _raise_for,
                                 second_stage_lp)
from ..recourse.problem import TwoStageProblem

# dense simplex is used below this many LP columns under backend='auto'
DENSE_LIMIT = 400


@dataclass(frozen=True)
class SAAProgram:
    """min c.v  s.t.  A_eq v = b_eq,  A_ub v <= b_ub,  lb <= v <= ub.

    Variables are x followed by one y-block per scenario.
    """

    c: np.ndarray
    A_eq: sp.csr_matrix
    b_eq: np.ndarray
    A_ub: sp.csr_matrix
    b_ub: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    n_first: int
    n_scenarios: int

    @property
    def n_vars(self) -> int:
        return self.c.size

    def to_linear_program(self) -> LinearProgram:
        return LinearProgram.from_inequalities(
            self.c, self.A_ub.toarray(), self.b_ub, self.A_eq.toarray(), self.b_eq,
            self.lb, self.ub)


def _scenarios(problem, scenarios):
    xi = np.atleast_2d(np.asarray(scenarios, dtype=np.float64))
    if xi.shape[1] != problem.d:
        raise ValueError(f"scenarios have dimension {xi.shape[1]}, problem expects {problem.d}")
    return xi


def assemble_saa(problem: TwoStageProblem, scenarios) -> SAAProgram:
    xi = _scenarios(problem, scenarios)
    n = xi.shape[0]
    Tm = sp.csr_matrix(problem.T)
    Wm = sp.csr_matrix(problem.W)
    A_eq = sp.hstack([sp.vstack([Tm] * n), sp.block_diag([Wm] * n)], format="csr")
    b_eq = problem.h(xi).ravel()
    A_ub = sp.hstack([sp.csr_matrix(problem.A_x),
                      sp.csr_matrix((problem.A_x.shape[0], n * problem.mbar))], format="csr")
    c = np.concatenate([problem.c, np.tile(problem.q / n, n)])
    lb = np.concatenate([problem.x_lb, np.zeros(n * problem.mbar)])
    ub = np.concatenate([problem.x_ub, np.full(n * problem.mbar, np.inf)])
    return SAAProgram(c, A_eq, b_eq, A_ub, problem.b_x.copy(), lb, ub, problem.m, n)


@dataclass(frozen=True)
class SAAResult:
    x: np.ndarray
    value: float
    method: str
    iterations: int = 1
    lower_bound: float = np.nan
    gap: float = 0.0


def _highs(c, A_ub, b_ub, A_eq, b_eq, lb, ub):
    bounds = np.column_stack([np.where(np.isfinite(lb), lb, -np.inf),
                              np.where(np.isfinite(ub), ub, np.inf)])
    bounds = [(None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi)
              for lo, hi in bounds]
    res = linprog(c, A_ub=A_ub if A_ub is not None and A_ub.shape[0] else None,
                  b_ub=b_ub if A_ub is not None and A_ub.shape[0] else None,
                  A_eq=A_eq if A_eq is not None and A_eq.shape[0] else None,
                  b_eq=b_eq if A_eq is not None and A_eq.shape[0] else None,
                  bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-9,
                           "dual_feasibility_tolerance": 1e-9})
    status = {0: LpStatus.OPTIMAL, 2: LpStatus.INFEASIBLE, 3: LpStatus.UNBOUNDED}.get(res.status)
    if status is None:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return status, res


def _pick_backend(backend, n_vars):
    if backend == "auto":
        return "simplex" if n_vars <= DENSE_LIMIT else "highs"
    if backend not in ("simplex", "highs"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def _solve_extensive(problem, xi, backend):
    prog = assemble_saa(problem, xi)
    backend = _pick_backend(backend, prog.n_vars)
    if backend == "simplex":
        sol = solve_lp(prog.to_linear_program())
        if sol.status is LpStatus.INFEASIBLE:
            raise RecourseInfeasibleError("(A1) violated or X empty: extensive form infeasible")
        _raise_for(sol.status, "in the extensive form")
        return SAAResult(sol.x[:problem.m].copy(), sol.value, "extensive")
    status, res = _highs(prog.c, prog.A_ub, prog.b_ub, prog.A_eq, prog.b_eq, prog.lb, prog.ub)
    if status is LpStatus.INFEASIBLE:
        raise RecourseInfeasibleError("(A1) violated or X empty: extensive form infeasible")
    _raise_for(status, "in the extensive form")
    return SAAResult(res.x[:problem.m].copy(), float(res.fun), "extensive")


class _Master:
    """min c.x + theta over X with aggregated optimality cuts."""

    def __init__(self, problem, backend):
        self.p = problem
        self.backend = backend
        self.cuts_A: list[np.ndarray] = []
        self.cuts_b: list[float] = []

    def add_cut(self, g, alpha):
        # theta >= alpha - g.x   <=>   -g.x - theta <= -alpha
        self.cuts_A.append(np.concatenate([-g, [-1.0]]))
        self.cuts_b.append(-alpha)

    def solve(self):
        p = self.p
        with_theta = bool(self.cuts_A)
        c = np.concatenate([p.c, [1.0]]) if with_theta else p.c.copy()
        A_x = np.hstack([p.A_x, np.zeros((p.A_x.shape[0], 1))]) if with_theta else p.A_x
        A_ub = np.vstack([A_x] + ([np.array(self.cuts_A)] if with_theta else []))
        b_ub = np.concatenate([p.b_x] + ([np.array(self.cuts_b)] if with_theta else []))
        lb = np.concatenate([p.x_lb, [-np.inf]]) if with_theta else p.x_lb
        ub = np.concatenate([p.x_ub, [np.inf]]) if with_theta else p.x_ub
        if self.backend == "simplex":
            sol = solve_lp(LinearProgram.from_inequalities(c, A_ub, b_ub, None, None, lb, ub))
            if sol.status is not LpStatus.OPTIMAL:
                raise RuntimeError(f"master problem {sol.status.value}")
            return sol.x[:p.m].copy(), sol.value
        status, res = _highs(c, sp.csr_matrix(A_ub), b_ub, None, None, lb, ub)
        if status is not LpStatus.OPTIMAL:
            raise RuntimeError(f"master problem {status.value}")
        return res.x[:p.m].copy(), float(res.fun)


def _second_stage(problem, x, xi, backend):
    if backend == "simplex":
        vals, pis = [], []
        for row in xi:
            sol = solve_lp(second_stage_lp(problem, x, row))
            _raise_for(sol.status, f"at xi={row.tolist()}")
            vals.append(sol.value)
            pis.append(sol.dual)
        return np.array(vals), np.array(pis)
    return BatchRecourse(problem).solve(x, xi, duals=True)


def _solve_l_shaped(problem, xi, backend, tol, max_iter):
    n = xi.shape[0]
    backend = _pick_backend(backend, problem.m + n * problem.mbar)
    master = _Master(problem, backend)
    x, _ = master.solve()
    H = problem.h(xi)
    best_x, best_ub, lb = None, np.inf, -np.inf
    for it in range(1, max_iter + 1):
        vals, pis = _second_stage(problem, x, xi, backend)
        ub = float(problem.c @ x + vals.mean())
        if ub < best_ub:
            best_ub, best_x = ub, x.copy()
        alpha = float(np.mean(np.sum(pis * H, axis=1)))
        g = (pis @ problem.T).mean(axis=0)
        master.add_cut(g, alpha)
        x, lb = master.solve()
        gap = best_ub - lb
        if gap <= tol * (1.0 + abs(best_ub)):
            return SAAResult(best_x, best_ub, "l_shaped", it, lb, gap)
    raise RuntimeError(f"L-shaped method did not converge in {max_iter} iterations "
                       f"(gap {best_ub - lb:.3e})")


def solve_saa(problem: TwoStageProblem, scenarios, method: str = "extensive",
              backend: str = "auto", tol: float = 1e-6, max_iter: int = 500) -> SAAResult:
    """Minimize c.x + (1/n) sum_j Phi(x, xi_j) over X."""
    xi = _scenarios(problem, scenarios)
    if method == "extensive":
        return _solve_extensive(problem, xi, backend)
    if method == "l_shaped":
        return _solve_l_shaped(problem, xi, backend, tol, max_iter)
    raise ValueError(f"unknown method {method!r}")


class SAAEstimator(BaseEstimator):
    """Fit a first-stage decision to a scenario sample.

    ``fit(X)`` takes scenarios as rows; ``predict(X)`` returns the recourse
    values Phi(x_, xi) and ``score(X)`` the negated sample objective.
    """

    def __init__(self, problem=None, method="extensive", backend="auto", tol=1e-6,
                 max_iter=500):
        self.problem = problem
        self.method = method
        self.backend = backend
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        if not isinstance(self.problem, TwoStageProblem):
            raise TypeError("problem must be a TwoStageProblem")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.problem.d:
            raise ValueError(f"X has {X.shape[1]} features, problem expects {self.problem.d}")
        self.n_features_in_ = X.shape[1]
        res = solve_saa(self.problem, X, self.method, self.backend, self.tol, self.max_iter)
        self.x_ = res.x
        self.objective_ = res.value
        self.n_iter_ = res.iterations
        return self

    def predict(self, X):
        check_is_fitted(self, "x_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return BatchRecourse(self.problem).values(self.x_, X)

    def score(self, X, y=None):
        return -float(self.problem.c @ self.x_ + self.predict(X).mean())
