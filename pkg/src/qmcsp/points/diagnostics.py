from __future__ import annotations

import numpy as np

from .pointset import PointSet

_ONE_MINUS = np.nextafter(1.0, 0.0)


def tent_transform(points: PointSet) -> PointSet:
    """Baker's map x -> 1 - |2x - 1|, with 1 capped to the largest double below 1."""
    y = 1.0 - np.abs(2.0 * points.points - 1.0)
    y = np.minimum(y, _ONE_MINUS)
    meta = dict(points.meta, tent=True)
    return PointSet(y, points.kind, points.seed, meta)


def weighted_l2_discrepancy(points: PointSet, u, gamma_u: float = 1.0) -> float:
    """Weighted L2 discrepancy of the projection onto the coordinates ``u`` (0-based).

    Uses Warnock's closed form for the squared L2 star discrepancy.
    """
    u = sorted(set(int(i) for i in u))
    if not u:
        raise ValueError("index set u must be nonempty")
    if u[0] < 0 or u[-1] >= points.d:
        raise ValueError("index set out of range")
    if gamma_u <= 0:
        raise ValueError("gamma_u must be positive")
    x = points.points[:, u]
    n, s = x.shape
    t1 = 3.0 ** -s
    t2 = np.prod((1.0 - x * x) / 2.0, axis=1).sum() * 2.0 / n
    t3 = 0.0
    for start in range(0, n, 1024):
        blk = x[start:start + 1024]
        mx = np.maximum(blk[:, None, :], x[None, :, :])
        t3 += np.prod(1.0 - mx, axis=2).sum()
    t3 /= n * n
    return float(np.sqrt(gamma_u * max(t1 - t2 + t3, 0.0)))


def dyadic_stratified(points: PointSet, m: int) -> np.ndarray:
    """Per coordinate, whether each interval of length 2^-m holds exactly n/2^m points."""
    cells = np.floor(points.points * 2**m).astype(np.int64)
    ok = []
    for j in range(points.d):
        counts = np.bincount(cells[:, j], minlength=2**m)
        ok.append(bool(np.all(counts == points.n // 2**m)) and points.n % 2**m == 0)
    return np.array(ok)
