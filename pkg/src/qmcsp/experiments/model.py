"""Production-planning model with ARMA demand."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..covariance import (ArmaSpec, arma_autocovariance, cholesky, pca_factor,
                          toeplitz_cov)
from ..points.mc import mt19937
from ..recourse.problem import TwoStageProblem


@dataclass(frozen=True)
class ProductionModelSpec:
    T: int = 20
    I: int = 3
    m1: int = 2
    m2: int = 1
    seed: int = 2024
    a: tuple = (0.001, 0.003)
    b: tuple = (0.3, 0.6)
    delta: tuple = (0.3, 0.35)
    w: tuple = (1e-6, 2e-5)
    z1: tuple = (5.0, 7.0)
    rho: tuple = (1.0, 1.1)
    c: tuple = (7.0, 9.0)
    cbar1: tuple = (8.0, 10.0)
    cbar2: tuple = (12.0, 14.0)
    alpha: tuple = (-0.52, 0.45)
    beta: tuple = (-0.17, 0.12, 0.05, -0.07, 0.06, 0.04)
    # synthetic trend m_t = level + amplitude * sin(2 pi t / T)
    trend_level: float = 3.0
    trend_amplitude: float = 1.0
    # standard deviation of the ARMA innovations
    noise_scale: float = 1.0

    def __post_init__(self):
        for key in ("a", "b", "delta", "w", "z1", "rho", "c", "cbar1", "cbar2"):
            lo, hi = getattr(self, key)
            if not lo <= hi:
                raise ValueError(f"range {key} is empty")
            object.__setattr__(self, key, (float(lo), float(hi)))
        if self.c[0] <= 0 or self.cbar1[0] <= 0:
            raise ValueError("prices must be positive")
        if self.cbar2[0] <= self.cbar1[1]:
            raise ValueError("cbar2 range must lie strictly above the cbar1 range")
        if self.a[1] > self.b[0]:
            raise ValueError("lower production bounds must not exceed upper ones")
        if not self.noise_scale > 0:
            raise ValueError("noise_scale must be positive")
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))

    @classmethod
    def paper_scale(cls, **kw) -> "ProductionModelSpec":
        return cls(**{"T": 100, "I": 10, "m1": 6, "m2": 2, **kw})

    @property
    def arma(self) -> ArmaSpec:
        return ArmaSpec(self.alpha, self.beta)

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    def trend(self) -> np.ndarray:
        t = np.arange(1, self.T + 1)
        return self.trend_level + self.trend_amplitude * np.sin(2 * np.pi * t / self.T)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def demand_covariance(spec: ProductionModelSpec) -> np.ndarray:
    lam = arma_autocovariance(spec.arma, spec.T) * spec.noise_scale ** 2
    return np.array(toeplitz_cov(lam).matrix)


def _draw(rs, rng, shape):
    return rs.uniform(rng[0], rng[1], size=shape)


def generate_model(spec: ProductionModelSpec = ProductionModelSpec(),
                   factorization: str = "pca") -> TwoStageProblem:
    """Standard-form two-stage problem for the production model.

    Second-stage columns are y[j, t] (index j*T + t) followed by slacks for
    the demand rows, lower bounds, upper bounds of the first m1 providers
    and both ramp directions.  The first T rows are the demand rows, so
    h(xi) = (xi, h_bar).
    """
    T, I, m1, m = spec.T, spec.I, spec.m1, spec.m
    rs = mt19937(spec.seed)
    a = _draw(rs, spec.a, (I, T))
    b = _draw(rs, spec.b, (I, T))
    delta = _draw(rs, spec.delta, (I, T - 1))
    w = _draw(rs, spec.w, (m, T))
    z = _draw(rs, spec.z1, (m1, T))
    rho = _draw(rs, spec.rho, (m, T - 1))
    c = _draw(rs, spec.c, (I, T))
    cbar = np.vstack([_draw(rs, spec.cbar1, (m1, T)), _draw(rs, spec.cbar2, (m - m1, T))])

    ny = m * T
    n_ramp = m * (T - 1)
    rows = T + ny + m1 * T + 2 * n_ramp
    cols = ny + T + ny + m1 * T + 2 * n_ramp
    W = np.zeros((rows, cols))
    h_bar = np.zeros(rows - T)
    col = ny
    yi = lambda j, t: j * T + t  # noqa: E731
    for t in range(T):                      # sum_j y_jt - s_t = xi_t - sum_i x_it
        W[t, [yi(j, t) for j in range(m)]] = 1.0
        W[t, col] = -1.0
        col += 1
    r = T
    for j in range(m):                      # y_jt - s = w_jt
        for t in range(T):
            W[r, yi(j, t)] = 1.0
            W[r, col] = -1.0
            h_bar[r - T] = w[j, t]
            r += 1
            col += 1
    for j in range(m1):                     # y_jt + s = z_jt
        for t in range(T):
            W[r, yi(j, t)] = 1.0
            W[r, col] = 1.0
            h_bar[r - T] = z[j, t]
            r += 1
            col += 1
    for sign in (1.0, -1.0):                # +-(y_jt - y_j,t+1) + s = rho_jt
        for j in range(m):
            for t in range(T - 1):
                W[r, yi(j, t)] = sign
                W[r, yi(j, t + 1)] = -sign
                W[r, col] = 1.0
                h_bar[r - T] = rho[j, t]
                r += 1
                col += 1
    q = np.concatenate([cbar.ravel(), np.zeros(cols - ny)])
    Tm = np.zeros((rows, I * T))
    for t in range(T):
        Tm[t, [i * T + t for i in range(I)]] = 1.0
    A_x = np.zeros((2 * I * (T - 1), I * T))
    b_x = np.zeros(2 * I * (T - 1))
    k = 0
    for sign in (1.0, -1.0):
        for i in range(I):
            for t in range(T - 1):
                A_x[k, i * T + t] = sign
                A_x[k, i * T + t + 1] = -sign
                b_x[k] = delta[i, t]
                k += 1
    sigma = demand_covariance(spec)
    factor = _factor(sigma, factorization)
    params = dict(a=a, b=b, delta=delta, w=w, z=z, rho=rho, c=c, cbar=cbar)
    return TwoStageProblem(
        c=c.ravel(), q=q, W=W, T=Tm, h_bar=h_bar, mean=spec.trend(), factor=factor,
        x_lb=a.ravel(), x_ub=b.ravel(), A_x=A_x, b_x=b_x,
        name=f"production_T{T}_I{I}_m{m1}+{spec.m2}",
        meta=dict(spec=spec, covariance=sigma, factorization=factorization, params=params))


def _factor(sigma, kind: str) -> np.ndarray:
    if kind == "pca":
        return pca_factor(sigma).A
    if kind == "cholesky":
        return cholesky(sigma).A
    raise ValueError(f"unknown factorization {kind!r}")


def with_factorization(problem: TwoStageProblem, kind: str) -> TwoStageProblem:
    sigma = problem.meta.get("covariance", problem.covariance)
    meta = dict(problem.meta, factorization=kind)
    return problem.replace(factor=_factor(sigma, kind), meta=meta)


def interior_point(problem: TwoStageProblem) -> np.ndarray:
    """Midpoint of the box, which satisfies the ramp rows for the default ranges."""
    x = 0.5 * (problem.x_lb + problem.x_ub)
    return problem.check_x(x)
