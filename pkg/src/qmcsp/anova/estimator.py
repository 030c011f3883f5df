from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import as_count
from .indices import dimension_report


class EffectiveDimensionAnalyzer(BaseEstimator):
    """Estimate the dimension profile of a black-box integrand.

    ``fit(f, d)`` takes a callable mapping an (N, d) array to N values.
    The result is stored in ``report_`` (a :class:`DimensionReport`).
    """

    def __init__(self, n_points=1024, replications=10, epsilon=0.01, top_pairs=6,
                 seed=0, sampler="sobol", domain="uniform"):
        self.n_points = n_points
        self.replications = replications
        self.epsilon = epsilon
        self.top_pairs = top_pairs
        self.seed = seed
        self.sampler = sampler
        self.domain = domain

    def fit(self, f, d):
        if not callable(f):
            raise TypeError("f must be callable")
        self.n_features_in_ = as_count(d, "d")
        if as_count(self.replications, "replications") < 2:
            raise ValueError("need at least two replications for standard errors")
        self.report_ = dimension_report(
            f, self.n_features_in_, epsilon=self.epsilon, top=self.top_pairs,
            n=as_count(self.n_points, "n_points"), replications=self.replications,
            seed=self.seed, sampler=self.sampler, domain=self.domain)
        self.mean_dimension_ = self.report_.mean_dimension
        self.truncation_dimension_ = self.report_.truncation_dimension
        return self

    def to_json(self, **kw) -> str:
        check_is_fitted(self, "report_")
        return self.report_.to_json(**kw)
