from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def as_count(n, name: str = "n", minimum: int = 1) -> int:
    if isinstance(n, (bool, np.bool_)) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(n).__name__}")
    n = int(n)
    if n < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {n}")
    return n


def as_seed(seed) -> int:
    seed = as_count(seed, "seed", minimum=0)
    if seed >= 2**64:
        raise ValueError("seed must fit in 64 bits")
    return seed


def as_matrix(a, name: str, square: bool = False) -> np.ndarray:
    a = check_array(a, dtype=np.float64, ensure_2d=True, ensure_min_samples=1,
                    input_name=name)
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def as_vector(v, name: str, length: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if length is not None and v.shape[0] != length:
        raise ValueError(f"{name} must have length {length}, got {v.shape[0]}")
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True
