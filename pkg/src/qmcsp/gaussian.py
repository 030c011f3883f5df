"""Inverse normal CDF (Moro), normal densities and Gaussian path generation."""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from ._validation import as_matrix, as_vector

_A = (2.50662823884, -18.61500062529, 41.39119773534, -25.44106049637)
_B = (-8.47351093090, 23.08336743743, -21.06224101826, 3.13082909833)
_C = (0.3374754822726147, 0.9761690190917186, 0.1607979714918209,
      0.0276438810333863, 0.0038405729373609, 0.0003951896511919,
      0.0000321767881768, 0.0000002888167364, 0.0000003960315187)
# Moro's original crossover is |u - 0.5| < 0.42; at 0.42 the central fit
# peaks at 3.0e-9, at 0.41 both branches stay below 2.5e-9.
_CENTRAL = 0.41
_TINY = np.nextafter(0.0, 1.0)
_EPS_LO = np.finfo(np.float64).eps
_ONE_MINUS = np.nextafter(1.0, 0.0)
_INV_SQRT_2PI = 0.3989422804014327


def inv_norm_cdf(u):
    """Standard normal quantile by Moro's algorithm, vectorized."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(~(u > 0.0) | ~(u < 1.0)):
        raise ValueError("inv_norm_cdf requires 0 < u < 1")
    y = u - 0.5
    out = np.empty_like(y)
    central = np.abs(y) < _CENTRAL
    yc = y[central]
    r = yc * yc
    num = yc * (((_A[3] * r + _A[2]) * r + _A[1]) * r + _A[0])
    den = (((_B[3] * r + _B[2]) * r + _B[1]) * r + _B[0]) * r + 1.0
    out[central] = num / den
    yt = y[~central]
    ut = u[~central]
    rt = np.where(yt > 0, 1.0 - ut, ut)
    s = np.log(-np.log(rt))
    poly = np.zeros_like(s)
    for c in reversed(_C):
        poly = poly * s + c
    out[~central] = np.where(yt < 0, -poly, poly)
    return out if out.ndim else float(out)


def norm_cdf(t):
    return ndtr(t)


def norm_pdf(t):
    t = np.asarray(t, dtype=np.float64)
    out = _INV_SQRT_2PI * np.exp(-0.5 * t * t)
    return out if out.ndim else float(out)


def partial_moment(a, b):
    """Mass and first moment of the standard normal on [a, b]; infinities allowed."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if np.any(a > b):
        raise ValueError("partial_moment requires a <= b")
    # upper-tail form keeps precision when both ends are large
    mass = np.where(a > 0, ndtr(-a) - ndtr(-b), ndtr(b) - ndtr(a))
    first = norm_pdf(a) - norm_pdf(b)
    if mass.ndim == 0:
        return float(mass), float(first)
    return mass, np.asarray(first)


def clamp_unit(u):
    return np.clip(u, _EPS_LO, _ONE_MINUS)


def to_gaussian(points, A, mean=None) -> np.ndarray:
    """Rows ``A @ inv_norm_cdf(u) + mean`` for each point ``u``.

    Coordinates at 0 or 1 are moved inside before inversion.
    """
    u = points.points if hasattr(points, "points") else np.asarray(points, dtype=np.float64)
    A = as_matrix(A, "A", square=True)
    if u.ndim != 2 or u.shape[1] != A.shape[0]:
        raise ValueError(f"points have dimension {u.shape[-1]}, factor expects {A.shape[0]}")
    mean = np.zeros(A.shape[0]) if mean is None else as_vector(mean, "mean", A.shape[0])
    eta = inv_norm_cdf(clamp_unit(u))
    return eta @ A.T + mean


class GaussianPathTransformer(TransformerMixin, BaseEstimator):
    """Map uniform points to N(mean, covariance) paths.

    Parameters
    ----------
    covariance : array of shape (d, d)
    mean : array of shape (d,), optional
    factorization : {'pca', 'cholesky'}

    Attributes
    ----------
    factor_ : Factorization
    n_features_in_ : int
    """

    def __init__(self, covariance=None, mean=None, factorization="pca"):
        self.covariance = covariance
        self.mean = mean
        self.factorization = factorization

    def fit(self, X=None, y=None):
        from .covariance import cholesky, pca_factor

        if self.covariance is None:
            raise ValueError("covariance must be given")
        sigma = as_matrix(self.covariance, "covariance", square=True)
        if self.factorization == "pca":
            self.factor_ = pca_factor(sigma)
        elif self.factorization == "cholesky":
            self.factor_ = cholesky(sigma)
        else:
            raise ValueError(f"unknown factorization {self.factorization!r}")
        d = sigma.shape[0]
        self.mean_ = np.zeros(d) if self.mean is None else as_vector(self.mean, "mean", d)
        if X is not None:
            validate_data(self, X, reset=True)
            if self.n_features_in_ != d:
                raise ValueError(f"X has {self.n_features_in_} features, covariance is {d}x{d}")
        else:
            self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, "factor_")
        X = X.points if hasattr(X, "points") else X
        X = validate_data(self, X, reset=False)
        return to_gaussian(X, self.factor_.A, self.mean_)

    def inverse_transform(self, X):
        check_is_fitted(self, "factor_")
        X = validate_data(self, X, reset=False)
        eta = np.linalg.solve(self.factor_.A, (X - self.mean_).T).T
        return norm_cdf(eta)
