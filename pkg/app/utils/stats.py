"""
Monte Carlo estimators, hypothesis tests, log-log regression and the
MCReport / ToleranceRule models used by every verification check.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, computed_field
from scipy import special, stats as sps

from ..errors import ParameterError, RegimeError, UsageError
from .theory import Model, Regime, critical_b, regime
from .urn import UrnModel, replacement_rule, sample_positions

logger = logging.getLogger(__name__)

DEFAULT_BATCHES = 32


class RuleKind(str, Enum):
    """How an estimate is compared with its target."""

    SE_BAND = "se_band"  # |est - target| <= value * se, se > 0
    KS = "ks"  # estimate is a p-value; pass iff p > value
    ABSOLUTE = "absolute"
    RELATIVE = "relative"
    EXACT = "exact"  # |est - target| <= value * max(1, |target|)


class ToleranceRule(BaseModel):
    """Acceptance rule applied to one estimate."""

    kind: RuleKind
    value: float = Field(..., ge=0.0)

    def passes(self, estimate: float, se: float, target: float) -> bool:
        if not (math.isfinite(estimate) and math.isfinite(target)):
            return False
        gap = abs(estimate - target)
        if self.kind is RuleKind.SE_BAND:
            # SE 0 means the sampler degenerated; never accept it.
            return math.isfinite(se) and se > 0 and gap <= self.value * se
        if self.kind is RuleKind.KS:
            return estimate > self.value
        if self.kind is RuleKind.ABSOLUTE:
            return gap <= self.value
        if self.kind is RuleKind.RELATIVE:
            return gap <= self.value * abs(target)
        return gap <= self.value * max(1.0, abs(target))


def se_band(k: float = 4.0) -> ToleranceRule:
    return ToleranceRule(kind=RuleKind.SE_BAND, value=k)


def ks_rule(threshold: float = 1e-3) -> ToleranceRule:
    return ToleranceRule(kind=RuleKind.KS, value=threshold)


def absolute(tol: float) -> ToleranceRule:
    return ToleranceRule(kind=RuleKind.ABSOLUTE, value=tol)


def relative(tol: float) -> ToleranceRule:
    return ToleranceRule(kind=RuleKind.RELATIVE, value=tol)


def exact(tol: float = 1e-12) -> ToleranceRule:
    return ToleranceRule(kind=RuleKind.EXACT, value=tol)


class MCReport(BaseModel):
    """One Monte Carlo estimate compared with its theoretical target."""

    name: str
    estimate: float
    se: float
    target: float
    rule: ToleranceRule
    replicas: int = Field(..., ge=0)
    seed: int
    note: str = ""

    @computed_field(alias="pass")
    @property
    def passed(self) -> bool:
        return self.rule.passes(self.estimate, self.se, self.target)

    def to_json_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    se_mean: float
    se_variance: float
    count: int


@dataclass(frozen=True)
class CovEstimate:
    cov: np.ndarray
    se: np.ndarray
    count: int


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    stderr: float


def batch_means_se(values, batches: int = DEFAULT_BATCHES) -> float:
    """
    Standard error of the mean by batch means.

    Falls back to the i.i.d. formula when there are fewer than two samples
    per batch.
    """
    x = np.asarray(values, dtype=float).ravel()
    n = x.size
    if n < 2:
        raise UsageError("standard error needs at least two samples")
    if n < 2 * batches:
        return float(x.std(ddof=1) / math.sqrt(n))
    means = np.array([chunk.mean() for chunk in np.array_split(x, batches)])
    return float(means.std(ddof=1) / math.sqrt(batches))


def mc_moments(samples, batches: int = DEFAULT_BATCHES) -> Moments:
    """
    Sample mean and unbiased variance with batch-means standard errors.

    Raises:
        UsageError: With fewer than two samples.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise UsageError(f"mc_moments needs at least two samples, got {x.size}")
    mean = float(x.mean())
    centered = x - mean
    return Moments(
        mean=mean,
        variance=float(x.var(ddof=1)),
        se_mean=batch_means_se(x, batches),
        se_variance=batch_means_se(centered**2, batches),
        count=x.size,
    )


def ratio_of_means(numerator, denominator, batches: int = DEFAULT_BATCHES) -> Tuple[float, float]:
    """
    Ratio of two sample means and its delta-method standard error.

    The error is the batch-means SE of the linearised residual
    numerator - R * denominator, divided by the denominator mean.

    Raises:
        UsageError: On mismatched lengths, fewer than two samples or a zero denominator mean.
    """
    x = np.asarray(numerator, dtype=float).ravel()
    y = np.asarray(denominator, dtype=float).ravel()
    if x.size != y.size or x.size < 2:
        raise UsageError(f"ratio_of_means needs two paired samples, got {x.size} and {y.size}")
    den = float(y.mean())
    if den == 0.0:
        raise UsageError("ratio_of_means needs a non-zero denominator mean")
    ratio = float(x.mean()) / den
    return ratio, batch_means_se(x - ratio * y, batches) / abs(den)


def mc_cov(samples, batches: int = DEFAULT_BATCHES) -> CovEstimate:
    """
    Covariance matrix of replicas observed on a time grid.

    Args:
        samples: Array (replicas, k).

    Returns:
        Unbiased covariance with batch-means standard errors per entry.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, k = x.shape
    if n < 2:
        raise UsageError(f"mc_cov needs at least two replicas, got {n}")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    se = np.empty((k, k))
    for a in range(k):
        for c in range(a, k):
            se[a, c] = se[c, a] = batch_means_se(centered[:, a] * centered[:, c], batches)
    return CovEstimate(cov=cov, se=se, count=n)


def ks_test(samples, cdf: Callable) -> TestResult:
    """One-sample Kolmogorov-Smirnov test against a CDF."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise UsageError("ks_test needs samples")
    res = sps.kstest(x, cdf)
    return TestResult(statistic=float(res.statistic), p_value=float(res.pvalue))


def ks_two_sample(a, b) -> TestResult:
    """Two-sample Kolmogorov-Smirnov test."""
    x = np.asarray(a, dtype=float).ravel()
    y = np.asarray(b, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise UsageError("ks_two_sample needs two non-empty samples")
    res = sps.ks_2samp(x, y)
    return TestResult(statistic=float(res.statistic), p_value=float(res.pvalue))


def chi_square_uniform(counts) -> TestResult:
    """Chi-square goodness of fit of category counts against the uniform law."""
    c = np.asarray(counts, dtype=float)
    if c.size < 2:
        raise UsageError("chi-square needs at least two categories")
    res = sps.chisquare(c)
    return TestResult(statistic=float(res.statistic), p_value=float(res.pvalue))


def gamma_cdf(x, shape: float, rate: float):
    """Gamma CDF via the regularized lower incomplete gamma function."""
    return special.gammainc(shape, rate * np.maximum(np.asarray(x, dtype=float), 0.0))


def loglog_slope(x, y) -> SlopeFit:
    """
    Ordinary least squares of log y on log x.

    Raises:
        UsageError: With fewer than three points or mismatched lengths.
        ParameterError: On non-positive values.
    """
    xs = np.asarray(x, dtype=float).ravel()
    ys = np.asarray(y, dtype=float).ravel()
    if xs.size != ys.size or xs.size < 3:
        raise UsageError("loglog_slope needs at least three (x, y) pairs")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ParameterError("loglog_slope needs strictly positive values")
    fit = sps.linregress(np.log(xs), np.log(ys))
    return SlopeFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r2=float(fit.rvalue**2),
        stderr=float(fit.stderr),
    )


def nlogn_slope(n, variances) -> SlopeFit:
    """
    Fit Var(S_n) = c n ln n + c' n by regressing Var(S_n)/n on ln n.

    Data following c n ln n exactly recover c with zero intercept.
    """
    ns = np.asarray(n, dtype=float).ravel()
    vs = np.asarray(variances, dtype=float).ravel()
    if ns.size != vs.size or ns.size < 3:
        raise UsageError("nlogn_slope needs at least three points")
    if np.any(ns <= 1):
        raise ParameterError("nlogn_slope needs n > 1")
    fit = sps.linregress(np.log(ns), vs / ns)
    return SlopeFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r2=float(fit.rvalue**2),
        stderr=float(fit.stderr),
    )


def critical_variance_target(model: Model, p: float) -> float:
    """Squared critical scaling constant: p/(1-p), 2p^2/(1-p) or 4p^2/(1-p)."""
    model = Model(model)
    if model is Model.ERW1:
        return p / (1.0 - p)
    if model is Model.ERW2:
        return 2.0 * p**2 / (1.0 - p)
    return 4.0 * p**2 / (1.0 - p)


def critical_variances(
    model: Model, p: float, n_grid: Sequence[int], replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """Var(S_n) on the grid for the critical model with memory parameter p."""
    model = Model(model)
    b = critical_b(model, p)
    alpha = 2.0 if model is Model.SRS else None
    rep = regime(model, b, p, alpha)
    if rep.regime is not Regime.CRITICAL:
        raise RegimeError(f"{model.value} with p={p}, b={b} is not critical")
    grid = sorted(int(n) for n in n_grid)
    if model is Model.SRS:
        from .srs import sample_cluster_power_sums

        sums = sample_cluster_power_sums(2.0, b, p, grid, replicas, rng)
        return 2.0 * sums.mean(axis=0)
    urn_model = UrnModel.REINFORCED_ERW if model is Model.ERW1 else UrnModel.STRONG_ERW
    positions = sample_positions(replacement_rule(urn_model, b, p), grid, replicas, rng)
    return positions.var(axis=0, ddof=1)


def critical_variance_check(
    model: Model,
    p: float,
    n_grid: Sequence[int],
    replicas: int,
    rng: np.random.Generator,
    seed: int = 0,
    tolerance: float = 0.15,
) -> MCReport:
    """
    Slope of Var(S_n) against n ln n at criticality versus the squared prefactor.

    Raises:
        RegimeError: If the implied parameters are not critical.
    """
    model = Model(model)
    grid = sorted(int(n) for n in n_grid)
    if len(grid) < 3:
        raise UsageError("critical_variance_check needs at least three horizons")
    variances = critical_variances(model, p, grid, replicas, rng)
    fit = nlogn_slope(grid, variances)
    logger.info("critical %s p=%s slope=%.4f", model.value, p, fit.slope)
    return MCReport(
        name=f"{model.value}-critical-variance-slope",
        estimate=fit.slope,
        se=fit.stderr,
        target=critical_variance_target(model, p),
        rule=relative(tolerance),
        replicas=replicas,
        seed=seed,
        note=f"Var(S_n)/n regressed on ln n over n in {grid}",
    )


def report_mean(
    name: str, samples, target: float, seed: int, k: float = 4.0, note: str = ""
) -> MCReport:
    """Sample mean against its target within k standard errors."""
    m = mc_moments(samples)
    return MCReport(
        name=name, estimate=m.mean, se=m.se_mean, target=target,
        rule=se_band(k), replicas=m.count, seed=seed, note=note,
    )


def report_estimate(
    name: str, estimate: float, se: float, target: float, replicas: int, seed: int,
    k: float = 4.0, note: str = "",
) -> MCReport:
    """Precomputed estimate and standard error against a target within k SE."""
    return MCReport(
        name=name, estimate=estimate, se=se, target=target,
        rule=se_band(k), replicas=replicas, seed=seed, note=note,
    )


def report_ks(
    name: str, result: TestResult, replicas: int, seed: int, threshold: float = 1e-3, note: str = ""
) -> MCReport:
    """KS (or chi-square) p-value against the acceptance threshold."""
    return MCReport(
        name=name, estimate=result.p_value, se=0.0, target=threshold,
        rule=ks_rule(threshold), replicas=replicas, seed=seed,
        note=note or f"statistic={result.statistic:.5g}",
    )


def report_slope(
    name: str, fit: SlopeFit, target: float, replicas: int, seed: int,
    tol: float = 0.05, note: str = "",
) -> MCReport:
    """Regression slope against an exponent within an absolute band."""
    return MCReport(
        name=name, estimate=fit.slope, se=fit.stderr, target=target,
        rule=absolute(tol), replicas=replicas, seed=seed,
        note=note or f"r2={fit.r2:.4f}",
    )


def report_exact(
    name: str, value: float, target: float, seed: int, tol: float = 1e-12,
    replicas: int = 0, note: str = "",
) -> MCReport:
    """Deterministic identity, compared to within tol * max(1, |target|)."""
    return MCReport(
        name=name, estimate=value, se=0.0, target=target,
        rule=exact(tol), replicas=replicas, seed=seed, note=note,
    )
