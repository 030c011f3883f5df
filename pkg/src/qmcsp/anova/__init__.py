"""ANOVA decomposition and effective-dimension estimation."""
from .estimator import EffectiveDimensionAnalyzer
from .indices import (DimensionReport, MeanDimensionResult, SobolIndexResult,
                      SuperpositionProfile, TruncationResult, VarianceEstimate,
                      ZeroVarianceError, dimension_report, mean_dimension, sobol_indices,
                      superposition_profile, total_variance, truncation_dimension)
from .quadrature import (AnovaDecomposition, QuadratureGrid, QuadratureNonconvergence,
                         anova_terms_small_d, subsets)

__all__ = [
    "AnovaDecomposition", "QuadratureGrid", "QuadratureNonconvergence", "anova_terms_small_d",
    "subsets", "VarianceEstimate", "total_variance", "SobolIndexResult", "sobol_indices",
    "MeanDimensionResult", "mean_dimension", "TruncationResult", "truncation_dimension",
    "SuperpositionProfile", "superposition_profile", "DimensionReport", "dimension_report",
    "ZeroVarianceError", "EffectiveDimensionAnalyzer",
]
