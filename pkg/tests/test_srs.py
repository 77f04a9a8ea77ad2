"""
Tests for the shark random swim simulators and limit laws.
"""
import math

import numpy as np
import pytest

from app.errors import ParameterError, RegimeError, UsageError
from app.utils.srs import (
    LimitCF,
    LimitCFSettings,
    SRSConfig,
    SRSMethod,
    critical_gaussian_scale,
    critical_limit_cf,
    empirical_weight_tail,
    estimate_z1_alpha_moment,
    limit_exponent,
    sample_cluster_power_sums,
    sample_paths,
    sample_supercritical_weights_batch,
    sample_supercritical_Z,
    scaling_exponent,
    simulate_srs,
    simulate_srs_replicas,
    size_statistic,
    stable_from_power_sums,
    subcritical_limit_cf,
    supercritical_tail_bound,
    supercritical_truncation,
    truncation_bound,
)
from app.utils.stable import StableParams
from app.utils.theory import Regime, srs_critical_scale

SMALL_CF = LimitCFSettings(paths=40, pilot_paths=8, grid_points=40, x_min=1e-3, x_floor=1e-5)


@pytest.mark.parametrize("method", list(SRSMethod))
def test_single_step_is_one_innovation(method):
    """S_1 is a single stable vector for both methods."""
    config = SRSConfig(alpha=1.5, dim=2, b=1.0, p=0.5, n=1)
    out = simulate_srs(config, np.random.default_rng(0), method=method)
    assert out.shape == (2,)
    assert np.all(np.isfinite(out))


def test_replicas_are_reproducible():
    """Replica batches depend on the base seed only."""
    config = SRSConfig(alpha=1.2, b=0.5, p=0.3, n=30, replicas=6, seed=5)
    a = simulate_srs_replicas(config, SRSMethod.CLUSTERS)
    b = simulate_srs_replicas(config, SRSMethod.CLUSTERS)
    assert a.shape == (6, 1)
    assert np.array_equal(a, b)


def test_config_regime():
    """The regime follows alpha*kappa against one."""
    assert SRSConfig(alpha=1.0, b=0.5, p=0.2, n=10).regime is Regime.SUB
    assert SRSConfig(alpha=2.0, b=0.0, p=0.5, n=10).regime is Regime.CRITICAL
    assert SRSConfig(alpha=2.0, b=1.0, p=0.5, n=10).regime is Regime.SUPER


def test_gaussian_methods_agree_in_variance():
    """For alpha = 2 the direct walk and the cluster form share Var(S_n)."""
    config = SRSConfig(alpha=2.0, b=0.3, p=0.2, n=40)
    rng = np.random.default_rng(1)
    direct = np.array([simulate_srs(config, rng)[0] for _ in range(2000)])
    sums = sample_cluster_power_sums(2.0, 0.3, 0.2, [40], 4000, rng)[:, 0]
    assert direct.var(ddof=1) == pytest.approx(2.0 * sums.mean(), rel=0.15)


def test_paths_and_power_sums_shapes():
    """Vectorised recorders return one row per replica and read time."""
    config = SRSConfig(alpha=1.5, dim=2, b=1.0, p=0.5, n=50)
    rng = np.random.default_rng(2)
    paths = sample_paths(config, [1, 10, 50], 7, rng)
    assert paths.shape == (7, 3, 2)
    sums = sample_cluster_power_sums(1.0, 1.0, 0.5, [1, 10, 50], 7, rng)
    assert np.allclose(sums, [1.0, 10.0, 50.0])
    zero = sample_cluster_power_sums(0.0, 1.0, 0.5, [5], 7, rng)
    assert np.all(zero[:, 0] >= 1) and np.all(zero[:, 0] <= 5)
    with pytest.raises(UsageError):
        sample_cluster_power_sums(1.0, 1.0, 0.5, [10, 5], 2, rng)


def test_stable_mixing_shape():
    """Mixing keeps the power-sum shape and appends the dimension."""
    out = stable_from_power_sums(np.ones((4, 3)), StableParams(alpha=1.5, dim=2), np.random.default_rng(3))
    assert out.shape == (4, 3, 2)


def test_subcritical_cf_properties():
    """Zero theta gives one and the values lie in (0, 1]."""
    alpha, b, p = 1.0, 0.5, 0.2
    thetas = np.array([[[0.0]], [[0.5]], [[1.0]]])
    cf = subcritical_limit_cf(thetas, [1.0], alpha, b, p, np.random.default_rng(4), SMALL_CF)
    assert cf.values[0] == 1.0
    assert cf.se[0] == 0.0
    assert np.all(np.abs(cf.values) <= 1.0)
    assert cf.x_min <= SMALL_CF.x_min


def test_subcritical_cf_homogeneity_on_independent_paths():
    """-log phi(c theta) matches c^alpha (-log phi(theta)) within the combined error."""
    alpha, b, p, c = 1.0, 0.5, 0.2, 2.0
    base = subcritical_limit_cf([[[0.5]]], [1.0], alpha, b, p, np.random.default_rng(4), SMALL_CF)
    scaled = subcritical_limit_cf([[[c * 0.5]]], [1.0], alpha, b, p, np.random.default_rng(5), SMALL_CF)
    e_base, se_base = limit_exponent(base)
    e_scaled, se_scaled = limit_exponent(scaled)
    assert se_base[0] > 0 and se_scaled[0] > 0
    assert e_scaled[0] != pytest.approx(c**alpha * e_base[0], rel=1e-9)
    combined = math.hypot(se_scaled[0], c**alpha * se_base[0])
    assert abs(e_scaled[0] - c**alpha * e_base[0]) <= 4.0 * combined


def test_limit_exponent_reads_log_values():
    """The exponent is -log phi and its error is se/phi."""
    cf = LimitCF(values=np.exp(-np.array([0.0, 0.5])).astype(complex), se=np.array([0.0, 0.01]), x_min=1e-3)
    exponent, se = limit_exponent(cf)
    assert np.allclose(exponent, [0.0, 0.5])
    assert se[1] == pytest.approx(0.01 * math.exp(0.5))


def test_subcritical_cf_regime_and_shape_errors():
    """The subcritical exponent rejects other regimes and bad theta shapes."""
    rng = np.random.default_rng(5)
    with pytest.raises(RegimeError):
        subcritical_limit_cf([[1.0]], [1.0], 2.0, 1.0, 0.5, rng, SMALL_CF)
    with pytest.raises(UsageError):
        subcritical_limit_cf(np.ones((1, 2, 1)), [1.0], 1.0, 0.5, 0.2, rng, SMALL_CF)
    with pytest.raises(UsageError):
        subcritical_limit_cf([[1.0], [1.0]], [1.0, 0.5], 1.0, 0.5, 0.2, rng, SMALL_CF)


def test_truncation_bound_shrinks():
    """The analytic bound decreases with the lower limit."""
    hi = truncation_bound(1e-2, 1.0, 1.0, 1.0, 0.5, 0.2)
    lo = truncation_bound(1e-4, 1.0, 1.0, 1.0, 0.5, 0.2)
    assert 0 < lo < hi


def test_critical_cf_structure():
    """The critical limit has independent, stationary increments in log time."""
    alpha, b, p, z = 2.0, 0.0, 0.5, 1.3
    one = critical_limit_cf([[[1.0]]], [1.0], alpha, b, p, z)[0]
    two = critical_limit_cf([[[1.0]]], [2.0], alpha, b, p, z)[0]
    assert np.log(two.real) == pytest.approx(2 * np.log(one.real))
    joint = critical_limit_cf([[[0.5], [1.0]]], [1.0, 2.0], alpha, b, p, z)[0]
    first = critical_limit_cf([[[1.5]]], [1.0], alpha, b, p, z)[0]
    last = critical_limit_cf([[[1.0]]], [1.0], alpha, b, p, z)[0]
    assert joint.real == pytest.approx((first * last).real)
    with pytest.raises(RegimeError):
        critical_limit_cf([[[1.0]]], [1.0], 1.5, b, p, z)


@pytest.mark.parametrize("p", [0.2, 0.3, 0.45])
def test_critical_gaussian_scale(p):
    """At b = 1 - 2p the Gaussian scale is sqrt(4p^2/(1-p))."""
    assert critical_gaussian_scale(1.0 - 2.0 * p, p) == pytest.approx(srs_critical_scale(p))


def test_z1_moment_estimate():
    """alpha = 0 is exact and small samples report an infinite SE."""
    rng = np.random.default_rng(6)
    assert estimate_z1_alpha_moment(0.0, 1.0, 0.5, 50, 100, rng) == (1.0, 0.0)
    _, se = estimate_z1_alpha_moment(1.0, 1.0, 0.5, 50, 1, rng)
    assert math.isinf(se)
    with pytest.raises(ParameterError):
        estimate_z1_alpha_moment(1.0, 1.0, 0.5, 0, 10, rng)


def test_supercritical_truncation_is_minimal():
    """The truncation index is the smallest one meeting the tolerance."""
    alpha, b, p, z = 2.0, 1.0, 0.5, 1.0
    index = supercritical_truncation(alpha, b, p, z, tol=0.01)
    assert supercritical_tail_bound(index, alpha, b, p, z) <= 0.01
    if index > 1:
        assert supercritical_tail_bound(index - 1, alpha, b, p, z) > 0.01
    assert supercritical_truncation(alpha, b, p, z, tol=0.001) >= index
    with pytest.raises(ParameterError):
        supercritical_truncation(alpha, b, p, z, tol=0.0)
    with pytest.raises(RegimeError):
        supercritical_truncation(1.0, 0.5, 0.2, z, tol=0.01)


def test_supercritical_weights():
    """Cluster weights are normalised sizes that sum to n^(1-kappa)."""
    n = 200
    weights = sample_supercritical_weights_batch(2.0, 1.0, 0.5, n, 5, np.random.default_rng(7))
    assert weights.shape == (5, n)
    assert np.allclose(weights.sum(axis=1), n ** 0.25)
    assert empirical_weight_tail(weights, 2.0, n) == 0.0
    config = SRSConfig(alpha=2.0, dim=3, b=1.0, p=0.5, n=n)
    assert sample_supercritical_Z(config, n, np.random.default_rng(8)).shape == (3,)


def test_size_statistic():
    """The median is the default below alpha = 1 and the mean is refused there."""
    values = np.array([1.0, 2.0, 9.0])
    assert size_statistic(values, 0.8) == 2.0
    assert size_statistic(values, 1.5) == 4.0
    with pytest.raises(UsageError):
        size_statistic(values, 1.0, statistic="mean")
    with pytest.raises(UsageError):
        size_statistic(values, 1.5, statistic="mode")


def test_scaling_exponent_grid_checks():
    """The grid needs four increasing horizons."""
    config = SRSConfig(alpha=2.0, b=1.0, p=0.5, n=10)
    rng = np.random.default_rng(9)
    with pytest.raises(UsageError):
        scaling_exponent(config, [10, 20, 40], 10, rng)
    with pytest.raises(UsageError):
        scaling_exponent(config, [10, 40, 20, 80], 10, rng)
    fit = scaling_exponent(config, [50, 100, 200, 400], 200, rng)
    assert 0.4 < fit.slope < 1.1
