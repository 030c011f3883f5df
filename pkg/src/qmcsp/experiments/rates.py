"""Empirical convergence rates from RMSE measurements."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats


@dataclass(frozen=True)
class RateFit:
    """Slope of log10(RMSE) against log10(n).

    ``half_width`` is a 95% confidence half-width. With one row of RMSEs it
    comes from the regression residuals, with several rows (repeats) from the
    spread of the per-repeat slopes.
    """

    slope: float
    intercept: float
    half_width: float
    repeat_slopes: tuple[float, ...]

    def contains(self, value: float) -> bool:
        return abs(self.slope - value) <= self.half_width

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "half_width": self.half_width, "repeat_slopes": list(self.repeat_slopes)}


def _line(lx, ly):
    res = stats.linregress(lx, ly)
    return float(res.slope), float(res.intercept), float(res.stderr)


def fit_rate(sizes, rmses) -> RateFit:
    """Least-squares rate fit.

    ``rmses`` is either a vector aligned with ``sizes`` or a (repeats, sizes)
    matrix.
    """
    n = np.asarray(sizes, dtype=np.float64)
    r = np.asarray(rmses, dtype=np.float64)
    if n.ndim != 1 or n.size < 3:
        raise ValueError("need at least 3 sample sizes")
    if np.any(n <= 0):
        raise ValueError("sample sizes must be positive")
    if r.ndim == 1:
        r = r[None, :]
    if r.ndim != 2 or r.shape[1] != n.size:
        raise ValueError(f"rmses shape {np.shape(rmses)} does not match {n.size} sizes")
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise ValueError("RMSE entries must be finite and positive")
    lx, ly = np.log10(n), np.log10(r)
    fits = [_line(lx, row) for row in ly]
    slopes = np.array([f[0] for f in fits])
    if len(fits) == 1:
        slope, icpt, se = fits[0]
        dof = n.size - 2
        hw = float(stats.t.ppf(0.975, dof) * se) if dof > 0 else np.inf
    else:
        slope = float(slopes.mean())
        icpt = float(np.mean([f[1] for f in fits]))
        k = slopes.size
        hw = float(stats.t.ppf(0.975, k - 1) * slopes.std(ddof=1) / np.sqrt(k))
    return RateFit(slope, icpt, hw, tuple(float(s) for s in slopes))
