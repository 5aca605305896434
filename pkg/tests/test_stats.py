import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special
from scipy import stats as sps

from loyaltygame.stats import (
    betainc_regularized,
    bootstrap_mean_ci,
    cohens_d,
    paired_t_test,
    pearson_r,
    spearman_rho,
    t_cdf,
    t_ppf,
    t_sf_two_sided,
)


@given(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(0, 1))
def test_incomplete_beta_vs_scipy(a, b, x):
    assert betainc_regularized(a, b, x) == pytest.approx(special.betainc(a, b, x), abs=1e-10)


@given(st.floats(-50, 50), st.integers(1, 200))
def test_t_cdf_vs_scipy(t, df):
    assert t_cdf(t, df) == pytest.approx(sps.t.cdf(t, df), abs=1e-10)


def test_t_edges():
    assert t_sf_two_sided(0.0, 5) == pytest.approx(1.0)
    assert t_sf_two_sided(math.inf, 5) == 0.0
    assert t_ppf(0.5, 3) == 0.0
    with pytest.raises(ValueError):
        t_ppf(1.0, 3)
    with pytest.raises(ValueError):
        betainc_regularized(0, 1, 0.5)


def test_paired_worked_value():
    t, p = paired_t_test([1, 2, 3, 4, 5], [0] * 5)
    assert t == pytest.approx(3 / (math.sqrt(2.5) / math.sqrt(5)))
    assert t == pytest.approx(4.2426, abs=1e-4)
    ref = sps.ttest_rel([1, 2, 3, 4, 5], [0] * 5)
    assert p == pytest.approx(ref.pvalue, rel=1e-8)


def test_paired_degenerate():
    assert paired_t_test([1, 2, 3], [1, 2, 3]) == (0.0, 1.0)
    with pytest.raises(ValueError):
        paired_t_test([2, 3, 4], [1, 2, 3])
    with pytest.raises(ValueError):
        paired_t_test([1, 2], [1])


def test_bootstrap_brackets_mean_and_is_deterministic():
    x = np.arange(1, 101)
    r = bootstrap_mean_ci(x, seed=7)
    assert r.ci_low < 50.5 < r.ci_high
    assert r.point_estimate == 50.5
    assert bootstrap_mean_ci(x, seed=7) == r
    assert bootstrap_mean_ci(x, seed=8) != r


def test_bootstrap_constant_sample():
    r = bootstrap_mean_ci([3.0] * 10)
    assert r.ci_low == r.ci_high == 3.0


def test_bootstrap_validation():
    with pytest.raises(ValueError):
        bootstrap_mean_ci([])
    with pytest.raises(ValueError):
        bootstrap_mean_ci([1, 2], resamples=10)


def test_cohens_d():
    x, y = [2, 4, 6, 8], [1, 3, 5, 7]
    sd = np.sqrt((np.var(x, ddof=1) + np.var(y, ddof=1)) / 2)
    assert cohens_d(x, y) == pytest.approx(1 / sd)
    assert cohens_d([1, 1], [1, 1]) == 0.0


@given(st.floats(-10, 10).filter(lambda a: abs(a) > 1e-3), st.floats(-10, 10))
def test_pearson_affine_exact(a, b):
    x = np.linspace(-3, 7, 9)
    r, p = pearson_r(x, a * x + b)
    assert abs(r - math.copysign(1.0, a)) < 1e-9
    assert p < 1e-12


def test_pearson_vs_scipy():
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=30), rng.normal(size=30)
    r, p = pearson_r(x, y)
    ref = sps.pearsonr(x, y)
    assert r == pytest.approx(ref[0], abs=1e-12)
    assert p == pytest.approx(ref[1], rel=1e-8)


def test_spearman_with_ties_vs_scipy():
    x = [1, 2, 2, 3, 5, 5, 5, 9]
    y = [2, 1, 4, 3, 6, 6, 8, 7]
    assert spearman_rho(x, y) == pytest.approx(sps.spearmanr(x, y)[0], abs=1e-12)


def test_correlation_degenerate():
    with pytest.raises(ValueError):
        spearman_rho([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson_r([1, 2], [1, 2])
