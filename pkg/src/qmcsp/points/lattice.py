"""Rank-1 lattice rules built component by component."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .._validation import as_count, is_prime
from .mc import mt19937
from .pointset import PointKind, PointSet


def bernoulli2(x):
    return x * x - x + 1.0 / 6.0


def product_weights(d: int, power: float = 3.0) -> np.ndarray:
    """Default weight sequence gamma_j = j**-power."""
    return np.arange(1, as_count(d, "d") + 1, dtype=np.float64) ** -power


def _check_weights(weights, d: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] < d:
        raise ValueError(f"need at least {d} weights")
    w = w[:d]
    if np.any(w <= 0) or np.any(np.diff(w) > 0):
        raise ValueError("weights must be positive and nonincreasing")
    return w


@dataclass(frozen=True)
class LatticeRule:
    n: int
    z: tuple[int, ...]

    def __post_init__(self):
        as_count(self.n, "n")
        if self.n > 1 and any(not 0 < zj < self.n for zj in self.z):
            raise ValueError("generator entries must lie in 1..n-1")

    @property
    def d(self) -> int:
        return len(self.z)


def worst_case_error(rule: LatticeRule, weights, exact: bool = False):
    """Shift-averaged squared worst-case error of ``rule``.

    With ``exact=True`` the sum is carried out in rational arithmetic on
    the binary values of the weights.
    """
    n, d = rule.n, rule.d
    w = _check_weights(weights, d)
    if exact:
        gam = [Fraction(float(g)) for g in w]
        total = Fraction(0)
        for k in range(n):
            prod = Fraction(1)
            for j, zj in enumerate(rule.z):
                x = Fraction(k * zj % n, n)
                prod *= 1 + gam[j] * (x * x - x + Fraction(1, 6))
            total += prod
        return total / n - 1
    k = np.arange(n)
    prod = np.ones(n)
    for j, zj in enumerate(rule.z):
        prod *= 1.0 + w[j] * bernoulli2((k * zj % n) / n)
    return float(prod.mean() - 1.0)


def cbc_construct(n: int, d: int, weights=None) -> LatticeRule:
    """Greedy CBC search over z_s in 1..n-1; ties go to the smallest candidate."""
    n = as_count(n, "n", minimum=2)
    d = as_count(d, "d")
    if not is_prime(n):
        raise ValueError(f"n={n} is not prime")
    w = _check_weights(product_weights(d) if weights is None else weights, d)
    k = np.arange(n)
    cand = np.arange(1, n)
    omega = bernoulli2((np.outer(k, cand) % n) / n)   # (n, n-1)
    prod = np.ones(n)
    z = []
    for s in range(d):
        err = (prod.sum() + w[s] * (prod @ omega)) / n - 1.0
        best = err.min()
        tol = 1e-12 * max(1.0, abs(best))
        pick = int(np.flatnonzero(err <= best + tol)[0])
        z.append(int(cand[pick]))
        prod = prod * (1.0 + w[s] * omega[:, pick])
    return LatticeRule(n, tuple(z))


def random_shift(d: int, seed: int) -> np.ndarray:
    return mt19937(seed).random_sample(as_count(d, "d"))


def shifted_lattice(rule: LatticeRule, shift) -> PointSet:
    shift = np.asarray(shift, dtype=np.float64)
    if shift.shape != (rule.d,):
        raise ValueError(f"shift must have length {rule.d}")
    if np.any(shift < 0) or np.any(shift >= 1):
        raise ValueError("shift must lie in [0, 1)")
    j = np.arange(rule.n)[:, None]
    x = (j * np.asarray(rule.z)[None, :] % rule.n) / rule.n + shift
    x = np.where(x >= 1.0, x - 1.0, x)
    kind = PointKind.LATTICE_SHIFTED if np.any(shift) else PointKind.LATTICE
    return PointSet(x, kind, None, {"z": rule.z, "shift": shift.tolist()})
