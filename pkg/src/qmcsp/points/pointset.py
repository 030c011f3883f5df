from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class PointKind(str, Enum):
    MC = "mc"
    SOBOL = "sobol"
    SOBOL_SCRAMBLED = "sobol_scrambled"
    LATTICE = "lattice"
    LATTICE_SHIFTED = "lattice_shifted"


@dataclass(frozen=True)
class PointSet:
    """Immutable set of ``n`` points in ``[0, 1)^d``.

    ``points`` is stored read-only; use ``np.array(ps.points)`` for a
    writable copy.
    """

    points: np.ndarray
    kind: PointKind
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array of shape (n, d)")
        if pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValueError("point set must be nonempty")
        if np.any(pts < 0.0) or np.any(pts >= 1.0):
            raise ValueError("coordinates must lie in [0, 1)")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "kind", PointKind(self.kind))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.kind == other.kind and self.seed == other.seed
                and np.array_equal(self.points, other.points))

    def __hash__(self):
        return hash((self.kind, self.seed, self.points.tobytes()))
