"""Exhaustive ANOVA decomposition for d <= 3 on tensor Gauss grids."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np


class QuadratureNonconvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: int = 32
    domain: str = "uniform"   # 'uniform' on [0,1]^d or 'gaussian' on R^d

    def rule(self, n: int | None = None):
        n = self.nodes if n is None else n
        if self.domain == "uniform":
            t, w = np.polynomial.legendre.leggauss(n)
            return 0.5 * (t + 1.0), 0.5 * w
        if self.domain == "gaussian":
            t, w = np.polynomial.hermite_e.hermegauss(n)
            return t, w / np.sqrt(2.0 * np.pi)
        raise ValueError(f"unknown domain {self.domain!r}")


def subsets(d: int, include_empty: bool = True):
    out = [()] if include_empty else []
    for k in range(1, d + 1):
        out.extend(combinations(range(d), k))
    return out


@dataclass
class AnovaDecomposition:
    d: int
    nodes: np.ndarray
    weights: np.ndarray
    terms: dict          # u -> f_u on the grid of the coordinates in u
    variances: dict      # u -> sigma_u^2, u nonempty
    mean: float
    total_variance: float

    def _full(self, u):
        f = self.terms[u]
        shape = [self.nodes.size if i in u else 1 for i in range(self.d)]
        return f.reshape(shape)

    def inner(self, u, v) -> float:
        """<f_u, f_v> in L2 of the product measure."""
        prod = self._full(u) * self._full(v)
        prod = np.broadcast_to(prod, (self.nodes.size,) * self.d)
        for _ in range(self.d):
            prod = prod @ self.weights
        return float(prod)

    def mean_dimension(self) -> float:
        return sum(len(u) * s for u, s in self.variances.items()) / self.total_variance

    def closed_index(self, u) -> float:
        u = set(u)
        return sum(s for v, s in self.variances.items() if set(v) <= u) / self.total_variance

    def total_index(self, u) -> float:
        u = set(u)
        return sum(s for v, s in self.variances.items() if set(v) & u) / self.total_variance


def _decompose(f, d, x, w):
    n = x.size
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    F = np.asarray(f(pts), dtype=np.float64).reshape((n,) * d)
    proj = {}
    for v in subsets(d):
        G = F
        for ax in sorted(set(range(d)) - set(v), reverse=True):
            G = np.tensordot(G, w, axes=([ax], [0]))
        proj[v] = G
    terms, variances = {}, {}
    for u in subsets(d):
        acc = np.zeros((n,) * len(u))
        for k in range(len(u) + 1):
            for v in combinations(u, k):
                # broadcast P_{-v} f (axes v) onto the axes of u
                shape = [n if i in v else 1 for i in u]
                acc = acc + (-1) ** (len(u) - k) * proj[v].reshape(shape)
        terms[u] = acc
        if u:
            sq = acc * acc
            for _ in u:
                sq = sq @ w
            variances[u] = float(sq)
    mean = float(proj[()])
    sq = F * F
    for _ in range(d):
        sq = sq @ w
    return terms, variances, mean, float(sq) - mean * mean


def anova_terms_small_d(f, d: int, grid: QuadratureGrid = QuadratureGrid(),
                        tol: float = 1e-8, check: bool = True) -> AnovaDecomposition:
    """All ANOVA terms f_u of ``f`` by inclusion-exclusion of quadrature projections.

    ``f`` maps an (N, d) array to N values.  With ``check`` the variances
    are recomputed with twice the nodes and must agree to ``tol`` relative.
    """
    if not 1 <= d <= 3:
        raise ValueError("exhaustive ANOVA supports 1 <= d <= 3")
    x, w = grid.rule()
    terms, variances, mean, total = _decompose(f, d, x, w)
    if check:
        x2, w2 = grid.rule(2 * grid.nodes)
        _, var2, mean2, total2 = _decompose(f, d, x2, w2)
        scale = max(abs(total2), abs(mean2), 1e-300)
        diff = max([abs(variances[u] - var2[u]) for u in variances] + [abs(mean - mean2)])
        if diff > tol * scale:
            raise QuadratureNonconvergence(
                f"ANOVA variances change by {diff:.3e} between {grid.nodes} and {2 * grid.nodes} nodes")
    return AnovaDecomposition(d, x, w, terms, variances, mean, total)
