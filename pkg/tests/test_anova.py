import json

import numpy as np
import pytest

from qmcsp.anova import (DimensionReport, EffectiveDimensionAnalyzer, QuadratureGrid,
                         QuadratureNonconvergence, ZeroVarianceError, anova_terms_small_d,
                         dimension_report, mean_dimension, sobol_indices, subsets,
                         superposition_profile, total_variance, truncation_dimension)


def additive(coef):
    coef = np.asarray(coef, dtype=float)
    return lambda x: (x - 0.5) @ coef


def product(x):
    return np.prod(x, axis=1)


def centered_product(x):
    return np.prod(2 * x - 1, axis=1)


# -- exhaustive oracle ---------------------------------------------------------

def test_additive_has_no_interaction():
    dec = anova_terms_small_d(lambda x: x[:, 0] + x[:, 1], 2)
    assert np.abs(dec.terms[(0, 1)]).max() <= 1e-8
    assert dec.mean == pytest.approx(1.0)


def test_product_mean_uniform():
    dec = anova_terms_small_d(product, 2)
    assert dec.mean == pytest.approx(0.25, abs=1e-14)
    # sigma_{j}^2 = 1/48, sigma_{12}^2 = 1/144
    assert dec.variances[(0,)] == pytest.approx(1 / 48)
    assert dec.variances[(0, 1)] == pytest.approx(1 / 144)
    assert dec.mean_dimension() == pytest.approx(8 / 7)


@pytest.mark.parametrize("f,d,domain", [
    (product, 3, "uniform"),
    (lambda x: np.exp(x[:, 0] * x[:, 1]) + np.sin(x[:, 2]), 3, "uniform"),
    (lambda x: np.maximum(x[:, 0] + 0.5 * x[:, 1], 0.0) ** 3, 2, "gaussian"),
    (lambda x: x[:, 0] ** 2 * x[:, 1], 2, "gaussian"),
])
def test_variance_sum_and_orthogonality(f, d, domain):
    grid = QuadratureGrid(48, domain)
    dec = anova_terms_small_d(f, d, grid, check=domain == "uniform")
    assert sum(dec.variances.values()) == pytest.approx(dec.total_variance, rel=1e-6)
    for u in subsets(d):
        for v in subsets(d):
            if u != v:
                assert abs(dec.inner(u, v)) <= 1e-8


def test_nonconvergence_detected():
    with pytest.raises(QuadratureNonconvergence):
        anova_terms_small_d(lambda x: np.abs(x[:, 0] - 0.3), 1, QuadratureGrid(4))


def test_dimension_limit():
    with pytest.raises(ValueError):
        anova_terms_small_d(product, 4)


# -- variance and indices --------------------------------------------------------

def test_total_variance_known_moments():
    assert total_variance(lambda x: x[:, 0], 1).value == pytest.approx(1 / 12, abs=1e-4)
    g = total_variance(lambda x: x[:, 0], 1, domain="gaussian")
    assert g.value == pytest.approx(1.0, abs=1e-2)
    assert total_variance(lambda x: np.full(x.shape[0], 3.0), 2).zero


def test_zero_variance_rejected_for_indices():
    with pytest.raises(ZeroVarianceError):
        sobol_indices(lambda x: np.ones(x.shape[0]), 2, [0])


def test_indices_single_variable():
    f = lambda x: x[:, 0]  # noqa: E731
    assert sobol_indices(f, 2, [0]).closed == pytest.approx(1.0, abs=1e-3)
    assert sobol_indices(f, 2, [1]).total == pytest.approx(0.0, abs=1e-12)


def test_indices_additive_closed_equals_total():
    coef = [1.0, 2.0, 3.0]
    share = np.square(coef) / np.sum(np.square(coef))
    for j in range(3):
        res = sobol_indices(additive(coef), 3, [j])
        assert res.closed == pytest.approx(share[j], abs=5e-3)
        assert res.total == pytest.approx(share[j], abs=5e-3)


def test_indices_centered_product():
    assert sobol_indices(centered_product, 2, [0]).closed == pytest.approx(0.0, abs=5e-3)
    assert sobol_indices(centered_product, 2, [1]).closed == pytest.approx(0.0, abs=5e-3)
    assert sobol_indices(centered_product, 2, [0, 1]).closed == pytest.approx(1.0, abs=5e-3)


def test_negative_estimates_clipped_with_flag():
    # tiny first-order effect buried under noise
    f = lambda x: centered_product(x) + 1e-6 * x[:, 0]  # noqa: E731
    res = sobol_indices(f, 2, [0], n=64, replications=4, sampler="mc", seed=1)
    assert res.closed >= 0.0
    if res.clipped:
        assert res.closed == 0.0


def test_estimator_unbiased_over_replications():
    dec = anova_terms_small_d(product, 3)
    exact = dec.closed_index((0,))
    res = sobol_indices(product, 3, [0], n=512, replications=30, seed=3)
    assert abs(res.closed - exact) <= 3 * res.closed_se + 1e-12


# -- mean dimension -----------------------------------------------------------------

def test_mean_dimension_additive():
    assert mean_dimension(additive([1, 1, 1, 1]), 4).value == pytest.approx(1.0, abs=0.02)


def test_mean_dimension_matches_oracle():
    exact = anova_terms_small_d(product, 2).mean_dimension()
    est = mean_dimension(product, 2, n=1024, replications=10)
    assert abs(est.value - exact) <= 3 * est.stderr


def test_mean_dimension_one_variable_exact():
    assert mean_dimension(lambda x: np.sin(3 * x[:, 0]), 1).value == 1.0


# -- truncation and superposition -----------------------------------------------------

def test_truncation_additive_power_law():
    d = 10
    coef = np.arange(1, d + 1) ** -2.0           # sigma_j^2 proportional to j^-4
    var = coef**2
    tail = 1 - np.cumsum(var) / var.sum()
    analytic = int(np.flatnonzero(tail <= 0.01)[0]) + 1
    assert analytic == 3
    res = truncation_dimension(additive(coef), d, 0.01)
    assert res.dimension == analytic


def test_truncation_first_variable_only():
    f = lambda x: np.exp(x[:, 0])  # noqa: E731
    for eps in (0.5, 0.1, 0.001):
        assert truncation_dimension(f, 5, eps).dimension == 1


def test_truncation_monotone_in_epsilon():
    f = additive(np.arange(1, 9) ** -1.0)
    dims = [truncation_dimension(f, 8, e).dimension for e in (0.3, 0.1, 0.03, 0.01)]
    assert dims == sorted(dims)


def test_truncation_tail_ratios_nonincreasing():
    res = truncation_dimension(lambda x: np.prod(1 + (x - 0.5) / np.arange(1, 7), axis=1), 6,
                               0.01)
    items = sorted(res.tail_ratios.items())
    for (s1, (r1, se1)), (s2, (r2, se2)) in zip(items, items[1:]):
        assert r2 <= r1 + 2 * (se1 + se2)


def test_superposition_profiles():
    add = superposition_profile(additive([1, 2, 3]), 3)
    assert add.order1 == pytest.approx(1.0, abs=5e-3) and add.certified
    prod = superposition_profile(centered_product, 2)
    assert prod.order1 == pytest.approx(0.0, abs=5e-3)
    assert prod.order12 == pytest.approx(1.0, abs=5e-3)


def test_transform_invariance():
    from qmcsp.gaussian import inv_norm_cdf

    f = lambda z: np.maximum(z[:, 0] + 0.3 * z[:, 1], 0.0)  # noqa: E731
    g = lambda u: f(inv_norm_cdf(u))  # noqa: E731
    a = mean_dimension(f, 2, domain="gaussian", seed=4)
    b = mean_dimension(g, 2, domain="uniform", seed=4)
    assert a.value == pytest.approx(b.value, abs=1e-12)


def test_epsilon_validation():
    with pytest.raises(ValueError):
        truncation_dimension(product, 2, 1.5)


# -- report and estimator ----------------------------------------------------------------

def test_dimension_report_json_roundtrip():
    rep = dimension_report(additive([1.0, 0.5, 0.25]), 3, n=256, replications=4)
    data = json.loads(rep.to_json())
    assert "mean_dimension_se" in data and "first_order_se" in data
    assert DimensionReport.from_json(rep.to_json()) == rep
    assert 1.0 - 0.05 <= rep.mean_dimension <= 3.0


def test_effective_dimension_analyzer():
    est = EffectiveDimensionAnalyzer(n_points=256, replications=4, top_pairs=3)
    est.fit(additive([1.0, 0.1, 0.01]), 3)
    assert est.truncation_dimension_ in (1, 2)
    assert est.mean_dimension_ == pytest.approx(1.0, abs=0.02)
    assert json.loads(est.to_json())["d"] == 3
    assert est.get_params()["top_pairs"] == 3
    with pytest.raises(ValueError):
        EffectiveDimensionAnalyzer(replications=1).fit(product, 2)
