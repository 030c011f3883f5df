"""ARMA autocovariances, Toeplitz covariance matrices and their factors."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.linalg import toeplitz

from ._config import TOL
from ._validation import as_count, as_matrix, as_vector


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised by :func:`cholesky`; ``index`` is the 0-based failing pivot."""

    def __init__(self, index: int, pivot: float):
        self.index = index
        self.pivot = pivot
        super().__init__(f"matrix not positive definite: pivot {index + 1} "
                         f"(1-based) has value {pivot:.3e}")


class NonStationaryError(ValueError):
    pass


@dataclass(frozen=True)
class ArmaSpec:
    """eta_t = sum alpha_i eta_{t-i} + sum beta_j g_{t-j} + g_t, unit noise variance."""

    alpha: tuple[float, ...] = ()
    beta: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))

    @property
    def p(self) -> int:
        return len(self.alpha)

    @property
    def q(self) -> int:
        return len(self.beta)

    @classmethod
    def paper_default(cls) -> "ArmaSpec":
        return cls((-0.52, 0.45), (-0.17, 0.12, 0.05, -0.07, 0.06, 0.04))


@dataclass(frozen=True)
class StationarityReport:
    stationary: bool
    ar_roots: np.ndarray
    ma_roots: np.ndarray
    min_ar_modulus: float
    min_common_distance: float

    def __bool__(self) -> bool:
        return self.stationary


def _poly_roots(coef: np.ndarray) -> np.ndarray:
    # coef are ascending-power coefficients of 1 + c_1 z + ... ; np.roots uses
    # companion-matrix eigenvalues
    return np.roots(coef[::-1]) if coef.size > 1 else np.zeros(0, dtype=complex)


def arma_stationarity(spec: ArmaSpec) -> StationarityReport:
    if spec.p and spec.alpha[-1] == 0.0:
        raise ValueError("degenerate AR polynomial: leading coefficient alpha_p is zero")
    if spec.q and spec.beta[-1] == 0.0:
        raise ValueError("degenerate MA polynomial: leading coefficient beta_q is zero")
    P = np.concatenate([[1.0], -np.asarray(spec.alpha)])
    Q = np.concatenate([[1.0], np.asarray(spec.beta)])
    ar = _poly_roots(P)
    ma = _poly_roots(Q)
    min_mod = float(np.abs(ar).min()) if ar.size else np.inf
    if ar.size and ma.size:
        dist = float(np.abs(ar[:, None] - ma[None, :]).min())
    else:
        dist = np.inf
    ok = min_mod > 1.0 and dist > 1e-9
    return StationarityReport(ok, ar, ma, min_mod, dist)


def psi_weights(spec: ArmaSpec, tol: float = TOL.psi_truncation, max_terms: int = 1_000_000) -> np.ndarray:
    """MA(infinity) coefficients psi_0 = 1, psi_1, ... truncated once |psi_K| < tol
    and the remaining recurrence memory is below tol as well."""
    alpha = np.asarray(spec.alpha)
    beta = np.concatenate([[1.0], spec.beta])
    psi = [1.0]
    k = 1
    while k < max_terms:
        val = beta[k] if k < beta.size else 0.0
        for i in range(1, min(spec.p, k) + 1):
            val += alpha[i - 1] * psi[k - i]
        psi.append(val)
        window = psi[-max(spec.p, 1):]
        if k >= spec.q and max(abs(v) for v in window) < tol:
            break
        k += 1
    else:
        raise RuntimeError("psi weights did not decay; process too close to a unit root")
    return np.array(psi)


def arma_autocovariance(spec: ArmaSpec, T: int) -> np.ndarray:
    """lambda(1..T), i.e. R(0..T-1)."""
    T = as_count(T, "T")
    if not arma_stationarity(spec):
        raise NonStationaryError("ARMA specification is not stationary")
    psi = psi_weights(spec)
    K = psi.size
    return np.array([psi[: K - k] @ psi[k:] if k < K else 0.0 for k in range(T)])


def yule_walker_residual(spec: ArmaSpec, lam) -> float:
    """Max residual of R(k) - sum_i alpha_i R(k-i) = sum_{j>=k} beta_j psi_{j-k}
    over the lags k where every R(|k-i|) is available."""
    lam = np.asarray(lam, dtype=np.float64)
    psi = psi_weights(spec)
    beta = np.concatenate([[1.0], spec.beta])
    res = 0.0
    for k in range(lam.size):
        lags = [abs(k - i) for i in range(1, spec.p + 1)]
        if lags and max(lags) >= lam.size:
            continue
        lhs = lam[k] - sum(a * lam[g] for a, g in zip(spec.alpha, lags))
        rhs = sum(beta[j] * psi[j - k] for j in range(k, spec.q + 1))
        res = max(res, abs(lhs - rhs))
    return res


def simulate_arma(spec: ArmaSpec, steps: int, seed: int, burn_in: int = 2000) -> np.ndarray:
    from scipy.signal import lfilter

    from .points.mc import mt19937

    g = mt19937(seed).standard_normal(steps + burn_in)
    P = np.concatenate([[1.0], -np.asarray(spec.alpha)])
    Q = np.concatenate([[1.0], np.asarray(spec.beta)])
    return lfilter(Q, P, g)[burn_in:]


@dataclass(frozen=True)
class CovarianceMatrix:
    matrix: np.ndarray
    toeplitz: bool = False

    def __post_init__(self):
        m = as_matrix(self.matrix, "covariance", square=True).copy()
        if not np.array_equal(m, m.T):
            raise ValueError("covariance matrix must be exactly symmetric")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def T(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def toeplitz_cov(lam) -> CovarianceMatrix:
    lam = as_vector(lam, "lambda")
    if lam[0] <= 0:
        raise ValueError("lambda(1) must be positive")
    return CovarianceMatrix(toeplitz(lam), toeplitz=True)


class FactorKind(str, Enum):
    CHOLESKY = "cholesky"
    PCA = "pca"


@dataclass(frozen=True)
class Factorization:
    A: np.ndarray
    kind: FactorKind
    eigenvalues: np.ndarray | None = field(default=None)

    def reconstruction_error(self, sigma) -> float:
        sigma = np.asarray(sigma)
        return float(np.abs(self.A @ self.A.T - sigma).max() / np.abs(sigma).max())


def _as_sym(sigma) -> np.ndarray:
    s = as_matrix(np.asarray(sigma), "sigma", square=True)
    if not np.allclose(s, s.T, rtol=0, atol=1e-12 * np.abs(s).max()):
        raise ValueError("matrix must be symmetric")
    return s


def cholesky(sigma) -> Factorization:
    """Lower-triangular L with L @ L.T = sigma (column-oriented Cholesky)."""
    s = _as_sym(sigma)
    n = s.shape[0]
    L = np.zeros_like(s)
    for j in range(n):
        piv = s[j, j] - L[j, :j] @ L[j, :j]
        if not piv > 0:
            raise NotPositiveDefiniteError(j, float(piv))
        L[j, j] = np.sqrt(piv)
        L[j + 1:, j] = (s[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return Factorization(L, FactorKind.CHOLESKY)


def jacobi_eigh(sigma, tol: float = TOL.jacobi_offdiag, max_sweeps: int = 100):
    """Cyclic Jacobi eigen-decomposition; returns unsorted (eigenvalues, vectors)."""
    a = _as_sym(sigma).copy()
    n = a.shape[0]
    v = np.eye(n)
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2) * 2.0)
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


def pca_factor(sigma) -> Factorization:
    """U_P = (sqrt(l_1) u_1, ..., sqrt(l_d) u_d) with eigenvalues descending."""
    s = _as_sym(sigma)
    lam, U = jacobi_eigh(s)
    order = np.argsort(-lam, kind="stable")
    lam, U = lam[order], U[:, order]
    scale = np.abs(s).max()
    if lam[-1] < -1e-8 * scale:
        raise np.linalg.LinAlgError(f"negative eigenvalue {lam[-1]:.3e}")
    lam = np.maximum(lam, 0.0)
    big = np.argmax(np.abs(U), axis=0)
    U = U * np.sign(U[big, np.arange(U.shape[1])])
    return Factorization(U * np.sqrt(lam), FactorKind.PCA, lam)


def orthogonal_equivalence(A, B, tol: float = TOL.orthogonality) -> bool:
    """Whether B = A Q for an orthogonal Q."""
    A = as_matrix(A, "A", square=True)
    B = as_matrix(B, "B", square=True)
    if np.linalg.cond(A) > 1.0 / np.finfo(float).eps:
        raise np.linalg.LinAlgError("A is singular")
    Q = np.linalg.solve(A, B)
    return bool(np.abs(Q.T @ Q - np.eye(A.shape[0])).max() <= tol)


def write_matrix_csv(matrix, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        for row in np.asarray(matrix):
            w.writerow([repr(float(v)) for v in row])
    return path


def read_matrix_csv(path) -> np.ndarray:
    with Path(path).open() as fh:
        return np.array([[float(v) for v in row] for row in csv.reader(fh)])
