"""Sobol' points and Matoušek linear scrambling (32-bit)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .._config import SOBOL_BITS
from .._validation import as_count
from .mc import mt19937
from .pointset import PointKind, PointSet

_MASK = (1 << SOBOL_BITS) - 1
_SCALE = float(2**SOBOL_BITS)


@dataclass(frozen=True)
class DirectionRecord:
    dim: int
    s: int
    a: int
    m: tuple[int, ...]


class DirectionNumberTable:
    """Primitive polynomials and initial direction integers.

    Dimension 1 is the radical-inverse case and is implicit; ``records``
    hold dimensions 2, 3, ... in Joe–Kuo order.
    """

    def __init__(self, records):
        records = list(records)
        for k, rec in enumerate(records):
            if rec.dim != k + 2:
                raise ValueError(f"expected dimension {k + 2}, found {rec.dim}")
            if len(rec.m) != rec.s or rec.s < 1:
                raise ValueError(f"dimension {rec.dim}: need s={rec.s} initial values")
            if rec.a >= 1 << max(rec.s - 1, 0):
                raise ValueError(f"dimension {rec.dim}: coefficient a too large")
            for i, mi in enumerate(rec.m, start=1):
                if mi % 2 == 0 or mi >= 1 << i:
                    raise ValueError(f"dimension {rec.dim}: m_{i}={mi} must be odd and < 2^{i}")
        self.records = tuple(records)

    @property
    def max_dim(self) -> int:
        return len(self.records) + 1

    @classmethod
    def from_text(cls, text: str) -> "DirectionNumberTable":
        records = []
        for line in text.splitlines():
            parts = line.split()
            if not parts or not parts[0].isdigit():
                continue  # header or blank
            vals = [int(p) for p in parts]
            records.append(DirectionRecord(vals[0], vals[1], vals[2], tuple(vals[3:])))
        return cls(records)

    @classmethod
    def from_file(cls, path) -> "DirectionNumberTable":
        return cls.from_text(Path(path).read_text())

    def direction_integers(self, d: int, bits: int = SOBOL_BITS) -> np.ndarray:
        """Array ``V`` of shape (d, bits); ``V[j, b]`` is the integer for bit b+1."""
        d = as_count(d, "d")
        if d > self.max_dim:
            raise ValueError(f"dimension {d} exceeds direction-number table ({self.max_dim})")
        V = np.zeros((d, bits), dtype=np.uint64)
        V[0] = [1 << (bits - b) for b in range(1, bits + 1)]
        for j in range(1, d):
            rec = self.records[j - 1]
            s, a = rec.s, rec.a
            v = [0] * (bits + 1)
            for i in range(1, min(s, bits) + 1):
                v[i] = rec.m[i - 1] << (bits - i)
            for i in range(s + 1, bits + 1):
                v[i] = v[i - s] ^ (v[i - s] >> s)
                for k in range(1, s):
                    if (a >> (s - 1 - k)) & 1:
                        v[i] ^= v[i - k]
            V[j] = v[1:]
        return V


@lru_cache(maxsize=1)
def default_table() -> DirectionNumberTable:
    text = resources.files("qmcsp.points").joinpath("data/joe_kuo_1024.txt").read_text()
    return DirectionNumberTable.from_text(text)


def _digital_points(n: int, V: np.ndarray, gray: bool) -> np.ndarray:
    idx = np.arange(n, dtype=np.uint64)
    if gray:
        idx = idx ^ (idx >> np.uint64(1))
    out = np.zeros((n, V.shape[0]), dtype=np.uint64)
    for b in range(max(int(n - 1).bit_length(), 0)):
        bit = ((idx >> np.uint64(b)) & np.uint64(1)).astype(bool)
        out[bit] ^= V[:, b]
    return out


def _check(n, d, table):
    n = as_count(n, "n")
    if n > 2**SOBOL_BITS:
        raise ValueError("n exceeds 2^32")
    table = default_table() if table is None else table
    return n, as_count(d, "d"), table


def sobol_points(n: int, d: int, table: DirectionNumberTable | None = None,
                 gray: bool = False) -> PointSet:
    """First ``n`` unscrambled Sobol' points, natural index order unless ``gray``."""
    n, d, table = _check(n, d, table)
    x = _digital_points(n, table.direction_integers(d), gray)
    return PointSet(x / _SCALE, PointKind.SOBOL, None, {"gray": gray})


def _scramble_matrices(d: int, rs: np.random.RandomState) -> tuple[np.ndarray, np.ndarray]:
    # row k acts on digits 1..k+1; its diagonal digit sits at bit 31-k
    raw = rs.randint(0, 2**SOBOL_BITS, size=(d, SOBOL_BITS), dtype=np.uint64)
    pos = np.arange(SOBOL_BITS - 1, -1, -1, dtype=np.uint64)
    diag = np.uint64(1) << pos
    upper = (~(diag - np.uint64(1))) & np.uint64(_MASK)
    rows = (raw & upper) | diag
    shift = rs.randint(0, 2**SOBOL_BITS, size=d, dtype=np.uint64)
    return rows, shift


def _apply_linear(rows: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Multiply each direction integer by the bit matrix of its dimension."""
    anded = rows[:, None, :] & V[:, :, None]          # (d, bits_in, rows)
    parity = (np.bitwise_count(anded) & 1).astype(np.uint64)
    pos = np.arange(SOBOL_BITS - 1, -1, -1, dtype=np.uint64)
    return np.bitwise_or.reduce(parity << pos, axis=2)


def scramble_linear(n: int, d: int, table: DirectionNumberTable | None = None,
                    seed: int = 0, gray: bool = False) -> PointSet:
    """Sobol' points with random linear scrambling and a digital shift.

    Scrambling is linear over GF(2), so it is applied to the direction
    integers once rather than to every point.
    """
    n, d, table = _check(n, d, table)
    rows, shift = _scramble_matrices(d, mt19937(seed))
    V = _apply_linear(rows, table.direction_integers(d))
    x = _digital_points(n, V, gray) ^ shift
    return PointSet(x / _SCALE, PointKind.SOBOL_SCRAMBLED, seed, {"gray": gray})
