"""
Tests for the stable samplers and characteristic functions.
"""
import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from app.errors import ParameterError, UsageError
from app.utils.stable import (
    StableParams,
    empirical_cf,
    sample_isotropic_stable,
    sample_positive_stable,
    stable_cf,
)


def test_positive_stable_rejects_bad_index():
    """The one-sided index must lie strictly inside (0, 1)."""
    rng = np.random.default_rng(0)
    for index in (0.0, 1.0, 1.5):
        with pytest.raises(ParameterError):
            sample_positive_stable(index, rng)


def test_positive_stable_half_is_levy():
    """Index 1/2 gives the Levy law with scale 1/2."""
    rng = np.random.default_rng(1)
    x = sample_positive_stable(0.5, rng, size=5000)
    assert np.all(x > 0)
    result = stats.kstest(x, stats.levy(scale=0.5).cdf)
    assert result.pvalue > 1e-3


def test_isotropic_shapes():
    """A single draw is a vector, a batch is a matrix."""
    rng = np.random.default_rng(2)
    params = StableParams(alpha=1.5, dim=3)
    assert sample_isotropic_stable(params, rng).shape == (3,)
    assert sample_isotropic_stable(params, rng, size=4).shape == (4, 3)


def test_gaussian_case_variance():
    """alpha = 2 is a centred Gaussian with variance 2 per coordinate."""
    rng = np.random.default_rng(3)
    x = sample_isotropic_stable(StableParams(alpha=2.0, dim=2), rng, size=40000)
    assert np.allclose(x.var(axis=0), 2.0, rtol=0.05)


@pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5])
def test_empirical_cf_matches_exact(alpha):
    """The sampled CF agrees with exp(-|theta|^alpha) within a few standard errors."""
    rng = np.random.default_rng(4)
    x = sample_isotropic_stable(StableParams(alpha=alpha, dim=2), rng, size=20000)
    theta = np.array([0.6, 0.3])
    est = empirical_cf(x, theta)
    assert abs(est.value - stable_cf(theta, alpha)) < 5 * est.se


def test_empirical_cf_at_zero():
    """The CF at the origin is exactly one."""
    est = empirical_cf(np.arange(10.0), 0.0)
    assert est.value == 1.0
    assert est.se == pytest.approx(1 / np.sqrt(10))


def test_empirical_cf_usage_errors():
    """Empty samples and dimension mismatches are rejected."""
    with pytest.raises(UsageError):
        empirical_cf(np.zeros(0), 1.0)
    with pytest.raises(UsageError):
        empirical_cf(np.zeros((5, 2)), [1.0, 0.0, 0.0])


def test_stable_cf_uses_norm():
    """The exact CF depends on the Euclidean norm only."""
    assert stable_cf([3.0, 4.0], 1.0) == pytest.approx(np.exp(-5.0))
    assert stable_cf(0.0, 1.3) == 1.0


def test_params_validation():
    """alpha must lie in (0, 2]."""
    with pytest.raises(ValidationError):
        StableParams(alpha=2.5)
    with pytest.raises(ValidationError):
        StableParams(alpha=1.0, dim=0)


@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_empirical_cf_is_real(alpha):
    """Symmetric laws have a vanishing imaginary CF part on a theta grid."""
    n = 10_000
    x = sample_isotropic_stable(StableParams(alpha=alpha, dim=1), np.random.default_rng(5), size=n)
    for theta in (0.25, 0.5, 1.0, 2.0, 3.0):
        assert abs(empirical_cf(x, theta).value.imag) < 4 / np.sqrt(n)


@pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5, 2.0])
def test_planar_cf_is_rotation_invariant(alpha):
    """In two dimensions the CF at theta and at a rotated theta agree."""
    n = 10_000
    x = sample_isotropic_stable(StableParams(alpha=alpha, dim=2), np.random.default_rng(6), size=n)
    theta = np.array([0.8, 0.3])
    angle = 2.0
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    gap = empirical_cf(x, rotation @ theta).value - empirical_cf(x, theta).value
    assert abs(gap) < 6 / np.sqrt(n)


def test_near_gaussian_index_matches_gaussian_branch():
    """alpha just below 2 goes through the mixture and still matches the Gaussian case."""
    n = 10_000
    near = sample_isotropic_stable(StableParams(alpha=2.0 - 1e-9, dim=1), np.random.default_rng(7), size=n)
    gauss = sample_isotropic_stable(StableParams(alpha=2.0, dim=1), np.random.default_rng(8), size=n)
    assert stats.ks_2samp(near[:, 0], gauss[:, 0]).pvalue > 1e-3
