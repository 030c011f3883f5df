from __future__ import annotations

import numpy as np

from .._validation import as_count, as_seed
from .pointset import PointKind, PointSet


def mt19937(seed: int) -> np.random.RandomState:
    """Mersenne Twister stream for a 64-bit seed.

    Seeds below 2**32 use the reference ``init_genrand`` seeding, larger
    ones ``init_by_array`` on their two 32-bit words. ``random_sample``
    composes each double from two 32-bit draws (27 + 26 bits).
    """
    seed = as_seed(seed)
    if seed < 2**32:
        return np.random.RandomState(seed)
    return np.random.RandomState(
        np.array([seed & 0xFFFFFFFF, seed >> 32], dtype=np.uint32))


def mc_points(n: int, d: int, seed: int) -> PointSet:
    n = as_count(n, "n")
    d = as_count(d, "d")
    u = mt19937(seed).random_sample((n, d))
    return PointSet(u, PointKind.MC, seed)
