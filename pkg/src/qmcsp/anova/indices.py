"""Variance, Sobol' indices and effective dimensions by pick-freeze sampling."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from ..gaussian import clamp_unit, inv_norm_cdf
from ..points import mc_points, scramble_linear


class ZeroVarianceError(ValueError):
    pass


def _base_points(n: int, dim: int, seed: int, sampler: str) -> np.ndarray:
    if sampler == "sobol":
        return np.array(scramble_linear(n, dim, seed=seed).points)
    if sampler == "mc":
        return np.array(mc_points(n, dim, seed).points)
    raise ValueError(f"sampler must be 'sobol' or 'mc', got {sampler!r}")


class _Evaluator:
    """Maps cube points to the integrand domain and evaluates f."""

    def __init__(self, f, domain: str):
        if domain not in ("uniform", "gaussian"):
            raise ValueError(f"unknown domain {domain!r}")
        self.f = f
        self.domain = domain

    def __call__(self, u: np.ndarray) -> np.ndarray:
        z = inv_norm_cdf(clamp_unit(u)) if self.domain == "gaussian" else u
        return np.asarray(self.f(z), dtype=np.float64).reshape(u.shape[0])


@dataclass(frozen=True)
class VarianceEstimate:
    value: float
    stderr: float
    mean: float
    mean_stderr: float
    zero: bool


def total_variance(f, d: int, n: int = 4096, replications: int = 10, seed: int = 0,
                   sampler: str = "sobol", domain: str = "uniform") -> VarianceEstimate:
    """sigma^2(f) from ``replications`` independent randomized point sets.

    Replication r uses seed ``seed + r``.
    """
    ev = _Evaluator(f, domain)
    ddof = 1 if sampler == "mc" else 0
    vals, means = [], []
    for r in range(replications):
        fx = ev(_base_points(n, d, seed + r, sampler))
        vals.append(np.var(fx, ddof=ddof))
        means.append(fx.mean())
    vals, means = np.array(vals), np.array(means)
    se = vals.std(ddof=1) / np.sqrt(replications) if replications > 1 else np.inf
    mse = means.std(ddof=1) / np.sqrt(replications) if replications > 1 else np.inf
    value = float(vals.mean())
    return VarianceEstimate(value, float(se), float(means.mean()), float(mse),
                            bool(value <= 3.0 * se))


class _PickFreeze:
    """Shared evaluations for one replication: f(x), f(y) and mixed points."""

    def __init__(self, ev, d, n, seed, sampler):
        P = _base_points(n, 2 * d, seed, sampler)
        self.x, self.y = P[:, :d], P[:, d:]
        self.ev = ev
        self.fx = ev(self.x)
        self.fy = ev(self.y)
        self.var = 0.5 * np.mean((self.fx - self.fy) ** 2)

    def f_y_on(self, u) -> np.ndarray:
        """f at (y_u, x_{-u})."""
        z = self.x.copy()
        z[:, list(u)] = self.y[:, list(u)]
        return self.ev(z)

    def closed(self, u, fyu=None) -> float:
        # E[f(y) f(y_u, x_-u)] - I^2, paired with f(x) for the mean term
        fyu = self.f_y_on(u) if fyu is None else fyu
        return float(np.mean(self.fy * (fyu - self.fx)))

    def total(self, u, fyu=None) -> float:
        fyu = self.f_y_on(u) if fyu is None else fyu
        return float(0.5 * np.mean((self.fx - fyu) ** 2))


def _mean_se(vals):
    vals = np.asarray(vals, dtype=np.float64)
    se = vals.std(ddof=1, axis=0) / np.sqrt(vals.shape[0]) if vals.shape[0] > 1 else np.inf
    return vals.mean(axis=0), se


def _replicates(f, d, n, replications, seed, sampler, domain):
    ev = _Evaluator(f, domain)
    reps = [_PickFreeze(ev, d, n, seed + r, sampler) for r in range(replications)]
    var, _ = _mean_se([pf.var for pf in reps])
    if not var > 0:
        raise ZeroVarianceError("integrand has zero variance")
    return reps


@dataclass(frozen=True)
class SobolIndexResult:
    closed: float
    total: float
    closed_se: float
    total_se: float
    clipped: bool


def sobol_indices(f, d: int, u, n: int = 4096, replications: int = 10, seed: int = 0,
                  sampler: str = "sobol", domain: str = "uniform") -> SobolIndexResult:
    """Closed index S_u and total index S-bar_u of the 0-based subset ``u``."""
    u = tuple(sorted(set(int(i) for i in u)))
    if not u or u[0] < 0 or u[-1] >= d:
        raise ValueError("u must be a nonempty subset of range(d)")
    reps = _replicates(f, d, n, replications, seed, sampler, domain)
    cl, tot = [], []
    for pf in reps:
        fyu = pf.f_y_on(u)
        cl.append(pf.closed(u, fyu) / pf.var)
        tot.append(pf.total(u, fyu) / pf.var)
    (c, cse), (t, tse) = _mean_se(cl), _mean_se(tot)
    clipped = c < 0 or t < 0
    return SobolIndexResult(float(max(c, 0.0)), float(max(t, 0.0)), float(cse), float(tse),
                            bool(clipped))


@dataclass(frozen=True)
class MeanDimensionResult:
    value: float
    stderr: float
    total_indices: np.ndarray
    total_se: np.ndarray
    first_indices: np.ndarray
    first_se: np.ndarray


def _singles(reps, d):
    first, total = [], []
    for pf in reps:
        fr, tr = [], []
        for j in range(d):
            fyu = pf.f_y_on((j,))
            fr.append(pf.closed((j,), fyu) / pf.var)
            tr.append(pf.total((j,), fyu) / pf.var)
        first.append(fr)
        total.append(tr)
    return np.array(first), np.array(total)


def mean_dimension(f, d: int, n: int = 4096, replications: int = 10, seed: int = 0,
                   sampler: str = "sobol", domain: str = "uniform") -> MeanDimensionResult:
    """Sum over j of the total indices S-bar_{j}."""
    reps = _replicates(f, d, n, replications, seed, sampler, domain)
    first, total = _singles(reps, d)
    md, mdse = _mean_se(total.sum(axis=1))
    t, tse = _mean_se(total)
    s, sse = _mean_se(first)
    return MeanDimensionResult(float(md), float(mdse), t, tse, s, sse)


@dataclass(frozen=True)
class TruncationResult:
    dimension: int
    epsilon: float
    tail_ratios: dict          # s -> (ratio, stderr)
    widened: bool


def _truncation(reps, d, eps):
    cache: dict[int, tuple[float, float, float]] = {}

    def tail(s):
        if s not in cache:
            if s >= d:
                cache[s] = (0.0, 0.0, 0.0)
            else:
                u = tuple(range(s, d))
                ratios = [pf.total(u) / pf.var for pf in reps]
                absvals = [pf.total(u) for pf in reps]
                r, se = _mean_se(ratios)
                _, se_abs = _mean_se(absvals)
                cache[s] = (float(r), float(se), float(se_abs))
        return cache[s]

    lo, hi = 0, d     # tail(hi) <= eps holds; find the smallest such s >= 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid)[0] <= eps:
            hi = mid
        else:
            lo = mid
    s = max(hi, 1)
    var, _ = _mean_se([pf.var for pf in reps])
    widened = tail(s)[2] > eps * var / 3.0
    if s - 1 >= 1:
        widened = widened or tail(s - 1)[2] > eps * var / 3.0
    return TruncationResult(s, eps, {k: v[:2] for k, v in sorted(cache.items())}, bool(widened))


def truncation_dimension(f, d: int, epsilon: float = 0.01, n: int = 4096,
                         replications: int = 10, seed: int = 0, sampler: str = "sobol",
                         domain: str = "uniform") -> TruncationResult:
    """Smallest s with (sigma^2 - D_{1..s}) / sigma^2 <= epsilon, by bisection.

    The tail variance sigma^2 - D_{1..s} is the total variance of the
    trailing block, estimated with the Jansen form.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    reps = _replicates(f, d, n, replications, seed, sampler, domain)
    return _truncation(reps, d, epsilon)


@dataclass(frozen=True)
class SuperpositionProfile:
    order1: float
    order1_se: float
    order12: float
    order12_se: float
    pairs: tuple           # ((j, k), share, stderr)
    epsilon: float
    certified: bool


def _profile(reps, d, first_per_rep, top, eps):
    order1 = first_per_rep.sum(axis=1)
    ranking = np.argsort(-first_per_rep.mean(axis=0), kind="stable")[:min(top, d)]
    pairs = list(combinations(sorted(ranking.tolist()), 2))
    extra = np.zeros(len(reps))
    pair_stats = []
    for j, k in pairs:
        vals = []
        for r, pf in enumerate(reps):
            cl = pf.closed((j, k)) / pf.var
            vals.append(cl - first_per_rep[r, j] - first_per_rep[r, k])
        vals = np.array(vals)
        extra += vals
        m, se = _mean_se(vals)
        pair_stats.append(((j, k), float(m), float(se)))
    o1, o1se = _mean_se(order1)
    o12, o12se = _mean_se(order1 + extra)
    return SuperpositionProfile(float(o1), float(o1se), float(o12), float(o12se),
                                tuple(pair_stats), eps, bool(o12 >= 1.0 - eps))


def superposition_profile(f, d: int, epsilon: float = 0.01, top: int = 6, n: int = 4096,
                          replications: int = 10, seed: int = 0, sampler: str = "sobol",
                          domain: str = "uniform") -> SuperpositionProfile:
    """Variance shares of order-1 terms and of order-1 plus the top order-2 terms."""
    reps = _replicates(f, d, n, replications, seed, sampler, domain)
    first, _ = _singles(reps, d)
    return _profile(reps, d, first, top, epsilon)


@dataclass
class DimensionReport:
    d: int
    epsilon: float
    total_variance: float
    total_variance_se: float
    first_order: list
    first_order_se: list
    total_order: list
    total_order_se: list
    mean_dimension: float
    mean_dimension_se: float
    truncation_dimension: int
    truncation_widened: bool
    order1_ratio: float
    order1_ratio_se: float
    order12_ratio: float
    order12_ratio_se: float
    superposition_certified: bool
    pairs: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    def to_json(self, **kw) -> str:
        return json.dumps(asdict(self), **kw)

    @classmethod
    def from_json(cls, text: str) -> "DimensionReport":
        data = json.loads(text)
        data["pairs"] = [list(p) for p in data.get("pairs", [])]
        return cls(**data)


def dimension_report(f, d: int, epsilon: float = 0.01, top: int = 6, n: int = 1024,
                     replications: int = 10, seed: int = 0, sampler: str = "sobol",
                     domain: str = "uniform") -> DimensionReport:
    """All dimension diagnostics from one shared set of pick-freeze replications."""
    reps = _replicates(f, d, n, replications, seed, sampler, domain)
    var, var_se = _mean_se([pf.var for pf in reps])
    first, total = _singles(reps, d)
    s, sse = _mean_se(first)
    t, tse = _mean_se(total)
    md, mdse = _mean_se(total.sum(axis=1))
    trunc = _truncation(reps, d, epsilon)
    prof = _profile(reps, d, first, top, epsilon)
    return DimensionReport(
        d=d, epsilon=epsilon, total_variance=float(var), total_variance_se=float(var_se),
        first_order=s.tolist(), first_order_se=np.atleast_1d(sse).tolist(),
        total_order=t.tolist(), total_order_se=np.atleast_1d(tse).tolist(),
        mean_dimension=float(md), mean_dimension_se=float(mdse),
        truncation_dimension=trunc.dimension, truncation_widened=trunc.widened,
        order1_ratio=prof.order1, order1_ratio_se=prof.order1_se,
        order12_ratio=prof.order12, order12_ratio_se=prof.order12_se,
        superposition_certified=prof.certified,
        pairs=[[list(p), m, se] for p, m, se in prof.pairs],
        settings=dict(n=n, replications=replications, seed=seed, sampler=sampler,
                      domain=domain, top=top),
    )
