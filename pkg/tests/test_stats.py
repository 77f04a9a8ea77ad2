"""
Tests for estimators, regressions and report models.
"""
import json
import math

import numpy as np
import pytest
from scipy import stats

from app.errors import ParameterError, UsageError
from app.utils.stats import (
    MCReport,
    absolute,
    batch_means_se,
    chi_square_uniform,
    critical_variance_target,
    critical_variances,
    exact,
    gamma_cdf,
    ks_test,
    ks_two_sample,
    loglog_slope,
    mc_cov,
    mc_moments,
    nlogn_slope,
    ratio_of_means,
    relative,
    report_exact,
    report_mean,
    se_band,
)


def test_constant_samples():
    """Constant samples have zero variance and zero standard error."""
    m = mc_moments(np.full(100, 3.0))
    assert m.mean == 3.0
    assert m.variance == 0.0
    assert m.se_mean == 0.0
    with pytest.raises(UsageError):
        mc_moments([1.0])


def test_normal_mean_and_se():
    """The batch-means SE tracks sigma/sqrt(N) for i.i.d. data."""
    x = np.random.default_rng(0).standard_normal(6400)
    m = mc_moments(x)
    assert abs(m.mean) < 4 * m.se_mean
    assert m.se_mean == pytest.approx(1 / 80, rel=0.35)
    assert m.variance == pytest.approx(1.0, rel=0.05)
    assert batch_means_se(x[:10]) == pytest.approx(x[:10].std(ddof=1) / math.sqrt(10))


def test_covariance_estimate():
    """mc_cov agrees with numpy's covariance."""
    x = np.random.default_rng(1).standard_normal((500, 3))
    est = mc_cov(x)
    assert np.allclose(est.cov, np.cov(x.T))
    assert est.se.shape == (3, 3)
    assert np.allclose(est.se, est.se.T)


def test_ks_tests():
    """KS accepts the right law and two identical samples."""
    x = np.random.default_rng(2).standard_normal(2000)
    assert ks_test(x, stats.norm.cdf).p_value > 1e-3
    same = ks_two_sample(x, x)
    assert same.statistic == 0.0
    assert same.p_value == pytest.approx(1.0)
    assert chi_square_uniform([100, 100, 100]).p_value == pytest.approx(1.0)


def test_gamma_cdf_matches_scipy():
    """The incomplete-gamma CDF equals scipy's gamma law with rate parametrisation."""
    x = np.array([-1.0, 0.0, 0.3, 1.0, 4.0])
    got = gamma_cdf(x, 0.5, 0.5)
    assert np.allclose(got, stats.gamma(a=0.5, scale=2.0).cdf(x))


def test_loglog_slope_exact():
    """Pure power laws give their exponent with r2 = 1."""
    n = np.array([10, 100, 1000, 10000])
    fit = loglog_slope(n, 3.0 * n**0.75)
    assert fit.slope == pytest.approx(0.75)
    assert fit.r2 == pytest.approx(1.0)
    flat = loglog_slope(n, np.full(4, 2.0))
    assert flat.slope == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ParameterError):
        loglog_slope(n, [1.0, 0.0, 1.0, 1.0])
    with pytest.raises(UsageError):
        loglog_slope([1, 2], [1, 2])


def test_nlogn_slope_recovers_constant():
    """Var = c n ln n + c' n is fitted exactly."""
    n = np.array([100.0, 1000.0, 10000.0])
    fit = nlogn_slope(n, 0.4 * n * np.log(n) + 2.0 * n)
    assert fit.slope == pytest.approx(0.4)
    assert fit.intercept == pytest.approx(2.0)


def test_critical_targets():
    """Squared critical prefactors for the three walks."""
    assert critical_variance_target("erw1", 0.25) == pytest.approx(1 / 3)
    assert critical_variance_target("erw2", 0.25) == pytest.approx(2 * 0.0625 / 0.75)
    assert critical_variance_target("srs", 0.25) == pytest.approx(4 * 0.0625 / 0.75)


def test_critical_variances_need_criticality():
    """Variances grow with n and p must admit a non-negative critical b."""
    rng = np.random.default_rng(3)
    var = critical_variances("erw2", 0.25, [10, 40, 160], 400, rng)
    assert var.shape == (3,)
    assert var[0] < var[2]
    with pytest.raises(ParameterError):
        critical_variances("erw1", 0.6, [10, 20, 40], 10, rng)


def test_rules():
    """Tolerance rules, including the degenerate cases."""
    assert se_band(4).passes(1.0, 0.5, 2.9)
    assert not se_band(4).passes(1.0, 0.0, 1.0)
    assert not se_band(4).passes(float("nan"), 1.0, 0.0)
    assert absolute(0.1).passes(1.05, 0.0, 1.0)
    assert not relative(0.01).passes(1.05, 0.0, 1.0)
    assert exact(1e-12).passes(1e6 + 1e-7, 0.0, 1e6)


def test_report_json_has_pass_key():
    """Reports serialise the verdict under "pass"."""
    report = report_mean("mean", np.random.default_rng(4).standard_normal(1000), 0.0, seed=4)
    payload = report.to_json_dict()
    assert payload["pass"] is True
    assert payload["rule"]["kind"] == "se_band"
    assert set(payload) >= {"name", "estimate", "se", "target", "replicas", "seed", "note"}
    json.dumps(payload)
    failed = report_exact("gap", 1.0, 0.0, seed=0)
    assert isinstance(failed, MCReport)
    assert failed.passed is False


def test_ratio_of_means_delta_error():
    """Proportional samples give an exact ratio; noise gives the linearised error."""
    rng = np.random.default_rng(31)
    den = rng.uniform(1.0, 3.0, size=10_000)
    ratio, se = ratio_of_means(2.0 * den, den)
    assert ratio == pytest.approx(2.0)
    assert se == pytest.approx(0.0, abs=1e-12)
    noise = rng.normal(0.0, 0.5, size=den.size)
    ratio, se = ratio_of_means(2.0 * den + noise, den, batches=1000)
    assert abs(ratio - 2.0) < 4 * se
    assert se == pytest.approx(0.5 / np.sqrt(den.size) / den.mean(), rel=0.15)


def test_ratio_of_means_errors():
    """Unpaired samples and a zero denominator are usage errors."""
    with pytest.raises(UsageError):
        ratio_of_means([1.0, 2.0], [1.0])
    with pytest.raises(UsageError):
        ratio_of_means([1.0, 2.0], [1.0, -1.0])
