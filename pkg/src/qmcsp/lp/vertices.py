"""Vertices and edges of D = {z : W^T z <= q} by combinatorial enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .._config import TOL
from .._validation import as_matrix, as_vector

MAX_R = 12


class EmptyPolyhedronError(ValueError):
    pass


@dataclass(frozen=True)
class VertexList:
    vertices: np.ndarray              # (l, r)
    active: tuple[frozenset, ...]     # tight row indices per vertex

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def r(self) -> int:
        return self.vertices.shape[1]


def _tight(W, q, z, tol):
    slack = q - W.T @ z
    return frozenset(np.flatnonzero(np.abs(slack) <= tol * np.maximum(1.0, np.abs(q))).tolist())


def enumerate_vertices(W, q, max_r: int = MAX_R, max_subsets: int = 5_000_000) -> VertexList:
    W = as_matrix(W, "W")
    r, mbar = W.shape
    q = as_vector(q, "q", mbar)
    if r > max_r:
        raise ValueError(f"r={r} exceeds the enumeration limit {max_r}")
    if comb(mbar, r) > max_subsets:
        raise ValueError(f"{comb(mbar, r)} row subsets exceed the limit {max_subsets}")
    if np.linalg.matrix_rank(W) < r:
        raise ValueError("W has rank < r: D contains a line and has no vertices")
    rows = W.T
    found: list[np.ndarray] = []
    subsets = np.array(list(combinations(range(mbar), r)), dtype=np.int64)
    for start in range(0, len(subsets), 20000):
        S = subsets[start:start + 20000]
        M = rows[S]                         # (k, r, r)
        sv = np.linalg.svd(M, compute_uv=False)
        ok = sv[:, -1] > 1e-12 * np.maximum(sv[:, 0], 1.0)
        if not ok.any():
            continue
        Z = np.linalg.solve(M[ok], q[S[ok]][..., None])[..., 0]
        feas = np.all(Z @ W <= q + TOL.dedup * np.maximum(1.0, np.abs(q)), axis=1)
        for z in Z[feas]:
            if not any(np.abs(z - v).max() <= TOL.dedup * max(1.0, np.abs(v).max()) for v in found):
                found.append(z)
    if not found:
        raise EmptyPolyhedronError("D = {z : W^T z <= q} is empty")
    V = np.array(found) + 0.0   # drop negative zeros
    active = tuple(_tight(W, q, v, TOL.dedup) for v in V)
    V.flags.writeable = False
    return VertexList(V, active)


def vertex_adjacency(vl: VertexList, W, q=None) -> list[tuple[int, int]]:
    """Pairs of vertices joined by an edge of D (0-based indices)."""
    W = as_matrix(W, "W")
    r = W.shape[0]
    pairs = []
    for i in range(len(vl)):
        for j in range(i + 1, len(vl)):
            shared = sorted(vl.active[i] & vl.active[j])
            rank = np.linalg.matrix_rank(W[:, shared]) if shared else 0
            if rank == r - 1:
                pairs.append((i, j))
    return pairs
