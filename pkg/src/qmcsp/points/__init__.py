"""Monte Carlo and randomized quasi-Monte Carlo point sets."""
from .diagnostics import dyadic_stratified, tent_transform, weighted_l2_discrepancy
from .lattice import (LatticeRule, bernoulli2, cbc_construct, product_weights,
                      random_shift, shifted_lattice, worst_case_error)
from .mc import mc_points, mt19937
from .pointset import PointKind, PointSet
from .sampler import SAMPLERS, cached_rule, generate_points
from .sobol import (DirectionNumberTable, DirectionRecord, default_table,
                    scramble_linear, sobol_points)

__all__ = [
    "PointKind", "PointSet", "mc_points", "mt19937", "DirectionNumberTable",
    "DirectionRecord", "default_table", "sobol_points", "scramble_linear",
    "LatticeRule", "bernoulli2", "cbc_construct", "product_weights",
    "random_shift", "shifted_lattice", "worst_case_error", "tent_transform",
    "weighted_l2_discrepancy", "dyadic_stratified", "SAMPLERS",
    "cached_rule", "generate_points",
]
