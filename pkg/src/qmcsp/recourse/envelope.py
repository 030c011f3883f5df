"""Upper envelopes along coordinate lines, ANOVA projections P_k f and their derivatives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .._config import TOL
from ..gaussian import norm_pdf, partial_moment
from ..lp import VertexList, enumerate_vertices, vertex_adjacency
from .problem import TwoStageProblem


# a line is dropped only if it wins on an interval shorter than this
_PRUNE = 1e-13


class GeometricConditionError(ValueError):
    """Adjacent active vertices share the k-th component along the scanned line."""

    def __init__(self, k, ties):
        self.k = k
        self.ties = ties
        super().__init__(f"(A5) fails along coordinate {k}: tied vertex pairs {ties}")


@dataclass(frozen=True)
class GeometricReport:
    satisfied: bool
    flags: tuple[tuple[int, int, int], ...]   # (vertex i, vertex j, shared component)


def check_geometric_condition(vertices: VertexList, adjacency, components=None,
                              tol: float = TOL.component_equal) -> GeometricReport:
    V = vertices.vertices
    comps = range(V.shape[1]) if components is None else components
    flags = []
    for i, j in adjacency:
        for c in comps:
            if abs(V[i, c] - V[j, c]) <= tol:
                flags.append((i, j, c))
    return GeometricReport(not flags, tuple(flags))


@dataclass(frozen=True)
class IntegrandSpec:
    """f(xi) = Phi(x, xi) with independent marginals N(mean_i, sigma_i^2)."""

    problem: TwoStageProblem
    x: np.ndarray
    vertices: VertexList
    mean: np.ndarray
    sigma: np.ndarray

    @classmethod
    def build(cls, problem: TwoStageProblem, x=None, vertices=None, mean=None, sigma=None):
        x = np.zeros(problem.m) if x is None else np.asarray(x, dtype=np.float64)
        problem.check_x(x)
        if vertices is None:
            vertices = enumerate_vertices(problem.W, problem.q)
        mean = problem.mean if mean is None else np.asarray(mean, dtype=np.float64)
        sigma = np.ones(problem.d) if sigma is None else np.asarray(sigma, dtype=np.float64)
        if np.any(sigma <= 0):
            raise ValueError("marginal sigmas must be positive")
        return cls(problem, x, vertices, mean, sigma)

    @property
    def d(self) -> int:
        return self.problem.d

    @property
    def V(self) -> np.ndarray:
        return self.vertices.vertices

    def __call__(self, xi):
        from .evaluate import eval_recourse_dual
        p = self.problem
        return eval_recourse_dual(self.vertices, self.x, xi, p.h_bar, p.T)[0]

    def base_rhs(self, k: int, xi) -> np.ndarray:
        """h(xi) - T x with component k set to zero."""
        xi = np.array(xi, dtype=np.float64)
        if xi.shape != (self.d,):
            raise ValueError(f"xi must have length {self.d}")
        xi[k] = 0.0
        return self.problem.rhs(self.x, xi)


@dataclass(frozen=True)
class BreakpointPath:
    k: int
    base: np.ndarray
    s: np.ndarray              # breakpoints, ascending
    active: np.ndarray         # vertex indices j_1..j_{p+1}
    intercepts: np.ndarray     # per active vertex
    slopes: np.ndarray
    ties: tuple[tuple[int, int], ...]

    @property
    def p(self) -> int:
        return self.s.size


def breakpoints(spec: IntegrandSpec, k: int, xi, tol: float = TOL.breakpoint) -> BreakpointPath:
    """Upper envelope of s -> <v^j, h(xi with xi_k = s) - T x>.

    ``xi`` is a full-length vector; its k-th entry is ignored.
    """
    if not 0 <= k < spec.d:
        raise IndexError(f"k={k} outside 0..{spec.d - 1}")
    t0 = spec.base_rhs(k, xi)
    V = spec.V
    a = V @ t0
    b = V[:, k]
    scale = max(1.0, float(np.abs(a).max()))
    order = np.lexsort((np.arange(a.size), -a, b))
    lines: list[int] = []
    ties = []
    for j in order:
        if lines and abs(b[j] - b[lines[-1]]) <= tol:
            if abs(a[j] - a[lines[-1]]) <= tol * scale:
                ties.append((int(lines[-1]), int(j)))
            continue  # lower or equal parallel line
        while len(lines) >= 2:
            i1, i2 = lines[-2], lines[-1]
            x12 = (a[i1] - a[i2]) / (b[i2] - b[i1])
            x13 = (a[i1] - a[j]) / (b[j] - b[i1])
            if x13 <= x12 + _PRUNE * max(1.0, abs(x12)):
                lines.pop()
            else:
                break
        lines.append(int(j))
    act = np.array(lines)
    s = (a[act[:-1]] - a[act[1:]]) / (b[act[1:]] - b[act[:-1]])
    # a tie only matters if the tied line is part of the envelope
    on = set(lines)
    ties = tuple(t for t in ties if t[0] in on)
    return BreakpointPath(k, np.array(xi, dtype=np.float64), s, act, a[act], b[act], ties)


def breakpoint_residuals(spec: IntegrandSpec, path: BreakpointPath) -> np.ndarray:
    """|w_k^i s_i + <w^i, h(xi with xi_k=0) - T x>| for each breakpoint."""
    t0 = spec.base_rhs(path.k, path.base)
    V = spec.V
    w = V[path.active[1:]] - V[path.active[:-1]]
    return np.abs(w[:, path.k] * path.s + w @ t0)


def _segments(spec, path):
    mu, sd = spec.mean[path.k], spec.sigma[path.k]
    edges = np.concatenate([[-np.inf], path.s, [np.inf]])
    z = (edges - mu) / sd
    return mu, sd, z


def project_k(spec: IntegrandSpec, k: int, xi) -> float:
    """(P_k f)(xi): integral of f over coordinate k against its marginal."""
    path = breakpoints(spec, k, xi)
    mu, sd, z = _segments(spec, path)
    mass, first = partial_moment(z[:-1], z[1:])
    return float(np.sum(path.intercepts * mass + path.slopes * (mu * mass + sd * first)))


def project_k_grad(spec: IntegrandSpec, k: int, l: int, xi) -> float:
    """d/dxi_l of P_k f for l != k."""
    if l == k:
        raise ValueError("l must differ from k")
    path = breakpoints(spec, k, xi)
    V = spec.V
    mu, sd = spec.mean[k], spec.sigma[k]
    w = V[path.active[1:]] - V[path.active[:-1]]
    cdf = ndtr((path.s - mu) / sd)
    return float(-(w[:, l] @ cdf) + V[path.active[-1], l])


def project_k_hess(spec: IntegrandSpec, k: int, l: int, r: int, xi) -> float:
    """d^2/dxi_l dxi_r of P_k f for l, r != k."""
    if k in (l, r):
        raise ValueError("l and r must differ from k")
    path = breakpoints(spec, k, xi)
    if path.ties:
        raise GeometricConditionError(k, path.ties)
    V = spec.V
    w = V[path.active[1:]] - V[path.active[:-1]]
    if np.any(w[:, k] == 0):
        raise GeometricConditionError(k, tuple(zip(path.active[:-1], path.active[1:])))
    mu, sd = spec.mean[k], spec.sigma[k]
    dens = norm_pdf((path.s - mu) / sd) / sd
    return float(np.sum(w[:, l] * w[:, r] / w[:, k] * dens))


def c1_jump(spec: IntegrandSpec, k: int, l: int, xi, h: float = 1e-7) -> float:
    """Right minus left limit of d/dxi_l P_k f at xi (one-sided, step h)."""
    xp = np.array(xi, dtype=np.float64)
    xm = xp.copy()
    xp[l] += h
    xm[l] -= h
    return project_k_grad(spec, k, l, xp) - project_k_grad(spec, k, l, xm)


def project_pair(spec: IntegrandSpec, k: int, l: int, xi, nodes: int = TOL.pair_quad_nodes) -> float:
    """(P_{k,l} f)(xi): closed-form integration over k, Gauss–Hermite over l."""
    if k == l:
        raise ValueError("k and l must differ")
    t, w = np.polynomial.hermite_e.hermegauss(nodes)
    w = w / np.sqrt(2.0 * np.pi)
    pt = np.array(xi, dtype=np.float64)
    total = 0.0
    for ti, wi in zip(t, w):
        pt[l] = spec.mean[l] + spec.sigma[l] * ti
        total += wi * project_k(spec, k, pt)
    return float(total)


@dataclass(frozen=True)
class SensitivityBounds:
    per_index: np.ndarray
    mean_dimension: float


def sensitivity_upper_bounds(vertices, variances, total_variance: float) -> SensitivityBounds:
    """Upper bounds on total sensitivity indices from the dual vertices.

    Only the first ``len(variances)`` vertex components (those multiplying
    xi) enter.
    """
    V = vertices.vertices if isinstance(vertices, VertexList) else np.atleast_2d(vertices)
    var = np.asarray(variances, dtype=np.float64)
    if not total_variance > 0:
        raise ValueError("total variance must be positive")
    Vd = np.abs(V[:, :var.size])
    per = var * Vd.max(axis=0) ** 2 / total_variance
    md = float(Vd.max(axis=1).max() ** 2 * var.sum() / total_variance)
    return SensitivityBounds(per, md)


def fixture_spec(name: str) -> tuple[IntegrandSpec, list]:
    from .problem import load_fixture
    p = load_fixture(name)
    spec = IntegrandSpec.build(p)
    return spec, vertex_adjacency(spec.vertices, p.W, p.q)
