"""Dense two-phase primal simplex with Bland's rule."""
from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .._config import TOL


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    STALLED = "stalled"


@dataclass(frozen=True)
class LinearProgram:
    """min c.x  s.t.  A_eq x = b_eq,  lb <= x <= ub."""

    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64).ravel()
        n = c.size
        A = np.asarray(self.A_eq, dtype=np.float64)
        if A.size == 0:
            A = A.reshape(0, n)
        b = np.asarray(self.b_eq, dtype=np.float64).ravel()
        if A.ndim != 2 or A.shape[1] != n or A.shape[0] != b.size:
            raise ValueError(f"inconsistent LP dimensions: c {n}, A {A.shape}, b {b.size}")
        if not np.all(np.isfinite(c)):
            raise ValueError("objective must be finite")
        lb = np.zeros(n) if self.lb is None else np.broadcast_to(np.asarray(self.lb, float), (n,)).copy()
        ub = np.full(n, np.inf) if self.ub is None else np.broadcast_to(np.asarray(self.ub, float), (n,)).copy()
        if np.any(lb > ub) or np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise ValueError("invalid variable bounds")
        for name, val in (("c", c), ("A_eq", A), ("b_eq", b), ("lb", lb), ("ub", ub)):
            val.flags.writeable = False
            object.__setattr__(self, name, val)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b_eq.size

    @classmethod
    def from_inequalities(cls, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
                          lb=None, ub=None) -> "LinearProgram":
        """Append one nonnegative slack per row of ``A_ub x <= b_ub``.

        The first ``len(c)`` variables of the result are the original ones.
        """
        c = np.asarray(c, dtype=np.float64).ravel()
        n = c.size
        A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, float))
        b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float).ravel()
        A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float))
        b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).ravel()
        k = A_ub.shape[0]
        A = np.block([[A_eq, np.zeros((A_eq.shape[0], k))], [A_ub, np.eye(k)]])
        lb = np.zeros(n) if lb is None else np.broadcast_to(np.asarray(lb, float), (n,))
        ub = np.full(n, np.inf) if ub is None else np.broadcast_to(np.asarray(ub, float), (n,))
        return cls(np.concatenate([c, np.zeros(k)]), A, np.concatenate([b_eq, b_ub]),
                   np.concatenate([lb, np.zeros(k)]), np.concatenate([ub, np.full(k, np.inf)]))


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    value: float
    x: np.ndarray | None
    dual: np.ndarray | None
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _standardize(lp: LinearProgram):
    """Rewrite as A' x' = b', x' >= 0 with x = offset + M x'."""
    n = lp.n_vars
    cols = []          # (original var, coefficient) per new column
    offset = np.zeros(n)
    bound_rows = []    # (new column, ub - lb)
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        if np.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                bound_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    nb = len(bound_rows)
    ncol = len(cols) + nb
    M = np.zeros((n, ncol))
    for k, (j, s) in enumerate(cols):
        M[j, k] = s
    m0 = lp.n_rows
    A = np.zeros((m0 + nb, ncol))
    A[:m0] = lp.A_eq @ M
    b = np.zeros(m0 + nb)
    b[:m0] = lp.b_eq - lp.A_eq @ offset
    for r, (k, width) in enumerate(bound_rows):
        A[m0 + r, k] = 1.0
        A[m0 + r, len(cols) + r] = 1.0
        b[m0 + r] = width
    c = lp.c @ M
    return A, b, c, M, offset, float(lp.c @ offset)


class _Tableau:
    def __init__(self, A, b, max_pivots):
        m, n = A.shape
        self.m, self.n = m, n
        self.sign = np.where(b < 0, -1.0, 1.0)
        t = np.zeros((m + 1, n + m + 1))
        t[:m, :n] = A * self.sign[:, None]
        t[:m, n:n + m] = np.eye(m)
        t[:m, -1] = b * self.sign
        self.t = t
        self.basis = np.arange(n, n + m)
        self.pivots = 0
        self.max_pivots = max_pivots

    def set_cost(self, cost):
        cost = np.asarray(cost, dtype=np.float64)
        row = np.zeros(self.t.shape[1])
        row[:cost.size] = cost
        cb = row[self.basis]
        self.t[-1] = row - cb @ self.t[:-1]

    def pivot(self, r, j):
        t = self.t
        t[r] /= t[r, j]
        col = t[:, j].copy()
        col[r] = 0.0
        t -= np.outer(col, t[r])
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed: int, tol_cost: float) -> LpStatus | None:
        """Bland iterations over columns < allowed; None means optimal."""
        t = self.t
        while True:
            red = t[-1, :allowed]
            cand = np.flatnonzero(red < -tol_cost)
            if cand.size == 0:
                return None
            j = int(cand[0])
            col = t[:-1, j]
            rows = np.flatnonzero(col > TOL.pivot)
            if rows.size == 0:
                return LpStatus.UNBOUNDED
            ratios = t[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(ties[np.argmin(self.basis[ties])])
            if self.pivots >= self.max_pivots:
                return LpStatus.STALLED
            self.pivot(r, j)


def solve_lp(lp: LinearProgram) -> LpSolution:
    A, b, c, M, offset, const = _standardize(lp)
    m, n = A.shape
    tab = _Tableau(A, b, 10 * (m + n) ** 2)
    scale_b = max(1.0, float(np.abs(b).max())) if m else 1.0
    if m:
        phase1 = np.concatenate([np.zeros(n), np.ones(m)])
        tab.set_cost(phase1)
        status = tab.run(n + m, TOL.pivot)
        if status is LpStatus.STALLED:
            return LpSolution(status, np.nan, None, None, tab.pivots)
        if -tab.t[-1, -1] > TOL.feasibility * scale_b:
            return LpSolution(LpStatus.INFEASIBLE, np.nan, None, None, tab.pivots)
        # drive zero-level artificials out of the basis where possible
        for r in range(m):
            if tab.basis[r] >= n:
                nz = np.flatnonzero(np.abs(tab.t[r, :n]) > TOL.pivot)
                if nz.size:
                    tab.pivot(r, int(nz[0]))
    tab.set_cost(c)
    scale_c = max(1.0, float(np.abs(c).max())) if n else 1.0
    status = tab.run(n, TOL.pivot * scale_c)
    if status is not None:
        return LpSolution(status, np.nan if status is LpStatus.STALLED else -np.inf,
                          None, None, tab.pivots)
    xs = np.zeros(n + m)
    xs[tab.basis] = tab.t[:-1, -1]
    x = offset + M @ xs[:n]
    y_std = -tab.t[-1, n:n + m] * tab.sign
    dual = y_std[:lp.n_rows]
    value = float(c @ xs[:n]) + const
    return LpSolution(LpStatus.OPTIMAL, value, x, dual, tab.pivots)


def dump_lp(lp: LinearProgram, stream=None) -> str:
    """Plain-text layout: objective, equality rows, bounds."""
    out = io.StringIO()
    out.write(f"LP {lp.n_rows} rows {lp.n_vars} vars\n")
    out.write("objective\n  " + " ".join(f"{v:.17g}" for v in lp.c) + "\n")
    out.write("rows\n")
    for i in range(lp.n_rows):
        out.write("  " + " ".join(f"{v:.17g}" for v in lp.A_eq[i]) + f" = {lp.b_eq[i]:.17g}\n")
    out.write("bounds\n")
    for j in range(lp.n_vars):
        out.write(f"  x{j} in [{lp.lb[j]:.17g}, {lp.ub[j]:.17g}]\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text
