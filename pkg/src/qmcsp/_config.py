"""Numerical tolerances shared across the package."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-8
    pivot: float = 1e-10
    dedup: float = 1e-9
    complementarity: float = 1e-7
    breakpoint: float = 1e-9
    component_equal: float = 1e-9
    cholesky_reconstruction: float = 1e-10
    pca_reconstruction: float = 1e-8
    jacobi_offdiag: float = 1e-12
    psi_truncation: float = 1e-14
    orthogonality: float = 1e-8
    # outer numeric integration used for |u| = 2 projections
    pair_quad_nodes: int = 64


TOL = Tolerances()

# output bits of the digital constructions
SOBOL_BITS = 32
