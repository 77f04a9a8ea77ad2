"""
Strongly reinforced shark random swim.

The swim is the strongly reinforced walk (weights grow at every step) with
isotropic alpha-stable innovations. Percolating the preferential attachment
tree groups the times into clusters that share one innovation, so

    S_n = sum_i |c_{i,n}| xi_i

in law. Conditionally on the cluster sizes S_n is therefore stable with
scale (sum_i |c_{i,n}|^alpha)^{1/alpha}. The regime is fixed by alpha*kappa
against 1, kappa = (b+p)/(b+1).
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from ..config import DEFAULT_SEED
from ..errors import ParameterError, RegimeError, UsageError
from .patree import (
    grow_discrete,
    grow_percolated_batch,
    percolate,
    sample_cluster_sizes_batch,
    sample_f_paths,
    sample_root_cluster_scaled,
)
from .replicas import chunk_size, iter_chunks, run_replicas
from .stable import StableParams, sample_isotropic_stable
from .stats import SlopeFit, batch_means_se, loglog_slope
from .theory import (
    Model,
    Regime,
    RegimeReport,
    beta_moment_tail,
    kappa,
    regime,
    second_moment_constant,
    validate_alpha,
    validate_bp,
    z1_moments,
)
from .walk import StableSteps, UpdateRule, WalkConfig, final_position

logger = logging.getLogger(__name__)

REGIME_TOL = 1e-9


class SRSMethod(str, Enum):
    """How S_n is produced."""

    DIRECT = "direct"  # run the walk engine
    CLUSTERS = "clusters"  # percolated tree plus one innovation per cluster


class SRSConfig(BaseModel):
    """Parameters of one shark random swim experiment."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0.0, le=2.0, description="Stability index")
    dim: int = Field(1, ge=1, description="Dimension d")
    b: float = Field(..., ge=0.0, description="Reinforcement increment")
    p: float = Field(..., gt=0.0, lt=1.0, description="Memory probability")
    n: int = Field(..., ge=1, description="Horizon")
    replicas: int = Field(1, ge=1, description="Independent replicas")
    seed: int = Field(DEFAULT_SEED, description="Base seed")

    @property
    def kappa(self) -> float:
        return kappa(Model.SRS, self.b, self.p)

    @property
    def alpha_kappa(self) -> float:
        return self.alpha * self.kappa

    @property
    def report(self) -> RegimeReport:
        return regime(Model.SRS, self.b, self.p, self.alpha)

    @property
    def regime(self) -> Regime:
        return self.report.regime

    @property
    def stable(self) -> StableParams:
        return StableParams(alpha=self.alpha, dim=self.dim)

    def walk_config(self) -> WalkConfig:
        return WalkConfig(
            p=self.p,
            b=self.b,
            rule=UpdateRule.ALWAYS,
            step_source=StableSteps(alpha=self.alpha, dim=self.dim),
        )


def simulate_srs(
    config: SRSConfig, rng: np.random.Generator, method: SRSMethod = SRSMethod.DIRECT
) -> np.ndarray:
    """
    Draw S_n once.

    Args:
        config: Swim parameters (config.n is the horizon).
        rng: Random generator.
        method: DIRECT runs the walk engine; CLUSTERS percolates a tree of
            n nodes and gives each cluster a fresh stable innovation.

    Returns:
        Vector of shape (d,).
    """
    method = SRSMethod(method)
    if method is SRSMethod.DIRECT:
        return final_position(config.walk_config(), config.n, rng)
    forest = percolate(grow_discrete(config.n, config.b, rng), config.p, rng)
    xi = sample_isotropic_stable(config.stable, rng, size=forest.n_clusters)
    return forest.sizes.astype(float) @ xi


def simulate_srs_replicas(
    config: SRSConfig, method: SRSMethod = SRSMethod.DIRECT, threads: int = 1
) -> np.ndarray:
    """
    S_n for config.replicas independent replicas seeded from config.seed.

    Returns:
        Array (replicas, d), identical for any worker count.
    """
    fn = partial(simulate_srs, config, method=SRSMethod(method))
    return np.stack(run_replicas(fn, config.replicas, config.seed, threads))


def _read_index(times: Sequence[int], n: int) -> np.ndarray:
    ts = np.asarray(times, dtype=np.int64)
    if ts.ndim != 1 or ts.size == 0:
        raise UsageError("times must be a non-empty 1-d sequence")
    if np.any(np.diff(ts) <= 0) or ts[0] < 1 or ts[-1] > n:
        raise UsageError(f"times must be strictly increasing within 1..{n}")
    return ts


class _PathRecorder:
    """Node callback keeping running positions and one innovation per cluster."""

    def __init__(self, params: StableParams, n: int, replicas: int, times: np.ndarray, rng):
        self.params = params
        self.rng = rng
        self.rows = np.arange(replicas)
        self.spins = np.zeros((replicas, n, params.dim))
        self.position = np.zeros((replicas, params.dim))
        self.times = times
        self.out = np.zeros((replicas, times.size, params.dim))
        self.slot = 0

    def __call__(self, k: int, label: np.ndarray, born: np.ndarray) -> None:
        if born.any():
            self.spins[born, k] = sample_isotropic_stable(
                self.params, self.rng, size=int(born.sum())
            )
        self.position += self.spins[self.rows, label]
        if self.slot < self.times.size and self.times[self.slot] == k + 1:
            self.out[:, self.slot] = self.position
            self.slot += 1


class _PowerSumRecorder:
    """Node callback tracking sum_i |c_{i,k}|^alpha without storing innovations."""

    def __init__(self, alpha: float, n: int, replicas: int, times: np.ndarray):
        self.alpha = alpha
        self.rows = np.arange(replicas)
        self.counts = np.zeros((replicas, n), dtype=np.int64)
        self.total = np.zeros(replicas)
        self.times = times
        self.out = np.zeros((replicas, times.size))
        self.slot = 0

    def __call__(self, k: int, label: np.ndarray, born: np.ndarray) -> None:
        c = self.counts[self.rows, label]
        before = np.where(c > 0, c.astype(float) ** self.alpha, 0.0)
        self.total += (c + 1.0) ** self.alpha - before
        self.counts[self.rows, label] = c + 1
        if self.slot < self.times.size and self.times[self.slot] == k + 1:
            self.out[:, self.slot] = self.total
            self.slot += 1


def sample_paths(
    config: SRSConfig, times: Sequence[int], replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """
    Positions S_t at the given times along vectorised cluster-representation runs.

    Returns:
        Array (replicas, len(times), d).
    """
    ts = _read_index(times, int(max(times)))
    n = int(ts[-1])
    out = np.empty((replicas, ts.size, config.dim))
    step = chunk_size(8 * n * (config.dim + 2), replicas)
    for start, stop in iter_chunks(replicas, step):
        recorder = _PathRecorder(config.stable, n, stop - start, ts, rng)
        grow_percolated_batch(n, config.b, config.p, stop - start, rng, on_node=recorder)
        out[start:stop] = recorder.out
    return out


def sample_cluster_power_sums(
    alpha: float,
    b: float,
    p: float,
    times: Sequence[int],
    replicas: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    sum_i |c_{i,t}|^alpha at each read time t, per replica.

    Returns:
        Array (replicas, len(times)).
    """
    validate_bp(b, p)
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    ts = _read_index(times, int(max(times)))
    n = int(ts[-1])
    out = np.empty((replicas, ts.size))
    step = chunk_size(16 * n, replicas)
    for start, stop in iter_chunks(replicas, step):
        recorder = _PowerSumRecorder(alpha, n, stop - start, ts)
        grow_percolated_batch(n, b, p, stop - start, rng, on_node=recorder)
        out[start:stop] = recorder.out
    return out


def stable_from_power_sums(
    power_sums: np.ndarray, params: StableParams, rng: np.random.Generator
) -> np.ndarray:
    """
    Mix stable vectors with scales (power_sums)^{1/alpha}.

    Returns:
        Array power_sums.shape + (d,).
    """
    ps = np.asarray(power_sums, dtype=float)
    xi = sample_isotropic_stable(params, rng, size=ps.size).reshape(ps.shape + (params.dim,))
    return (ps ** (1.0 / params.alpha))[..., None] * xi


class LimitCFSettings(BaseModel):
    """Monte Carlo settings of the subcritical limit characteristic function."""

    paths: int = Field(2000, ge=2, description="Independent f-paths")
    pilot_paths: int = Field(64, ge=2, description="f-paths used to size the truncation")
    grid_points: int = Field(200, ge=8, description="Log-spaced integration points")
    rel_tol: float = Field(0.01, gt=0.0, lt=1.0, description="Truncated mass relative to the integral")
    x_min: float = Field(1e-4, gt=0.0, description="First lower integration limit")
    x_floor: float = Field(1e-10, gt=0.0, description="Smallest lower integration limit")
    bound_constant: Optional[float] = Field(
        None, gt=0.0, description="Constant C in E[f(x)^alpha] <= C x^(-alpha kappa)"
    )


@dataclass(frozen=True)
class LimitCF:
    """Limit characteristic function values with Monte Carlo standard errors."""

    values: np.ndarray
    se: np.ndarray
    x_min: float


def limit_exponent(cf: LimitCF) -> Tuple[np.ndarray, np.ndarray]:
    """The exponent -log phi and its standard error, read off a LimitCF."""
    values = cf.values.real
    return -np.log(values), cf.se / values


def _theta_sets(thetas, k: int) -> np.ndarray:
    th = np.asarray(thetas, dtype=float)
    if th.ndim == 1:
        th = th[:, None]
    if th.ndim == 2:
        th = th[None]
    if th.ndim != 3 or th.shape[1] != k:
        raise UsageError(f"thetas must have shape (m, {k}, d), got {np.shape(thetas)}")
    return th


def _check_times(times) -> np.ndarray:
    ts = np.asarray(times, dtype=float).ravel()
    if ts.size == 0 or ts[0] <= 0 or np.any(np.diff(ts) <= 0):
        raise UsageError("times must be positive and strictly increasing")
    return ts


def _integration_grid(x_min: float, ts: np.ndarray, p: float, points: int) -> np.ndarray:
    """Log grid on [x_min, t_max(1-p)] plus both sides of every jump t_j(1-p)."""
    jumps = ts * (1.0 - p)
    grid = np.geomspace(x_min, jumps[-1], points)
    below = jumps * (1.0 - 1e-12)
    grid = np.unique(np.concatenate([grid, below, jumps]))
    return grid[grid >= x_min]


def _path_integrals(
    th: np.ndarray, ts: np.ndarray, alpha: float, b: float, p: float, grid: np.ndarray,
    paths: int, rng: np.random.Generator,
) -> np.ndarray:
    """J[m, s] = int ||sum_j f_s(x/t_j) theta_{m,j}||^alpha dx over the grid."""
    k = ts.size
    points = (grid[:, None] / ts[None, :]).ravel()
    f = sample_f_paths(points, b, p, rng, paths).reshape(paths, grid.size, k).astype(float)
    f[:, grid[:, None] >= ts[None, :] * (1.0 - p)] = 0.0
    logx = np.log(grid)
    out = np.empty((th.shape[0], paths))
    for m in range(th.shape[0]):
        vec = np.einsum("sgj,jd->sgd", f, th[m])
        integrand = np.linalg.norm(vec, axis=2) ** alpha * grid
        out[m] = integrate.trapezoid(integrand, logx, axis=1)
    return out


def truncation_bound(
    x_min: float, theta_norm: float, t_max: float, alpha: float, b: float, p: float,
    constant: Optional[float] = None,
) -> float:
    """Upper bound on the integral over (0, x_min) of E||sum_j f(x/t_j) theta_j||^alpha."""
    ak = alpha * kappa(Model.SRS, b, p)
    c = constant
    if c is None:
        c = (1.0 - p) ** ak * max(1.0, second_moment_constant(b, p) ** (alpha / 2.0))
    return c * theta_norm**alpha * t_max**ak * x_min ** (1.0 - ak) / (1.0 - ak)


def subcritical_limit_cf(
    thetas,
    times,
    alpha: float,
    b: float,
    p: float,
    rng: np.random.Generator,
    settings: Optional[LimitCFSettings] = None,
) -> LimitCF:
    """
    Limit characteristic function of n^{-1/alpha} S_{floor(tn)} when alpha*kappa < 1.

    The exponent int_0^inf E||sum_j f(x/t_j) theta_j||^alpha dx is averaged
    over independent f-paths, integrated with the trapezoid rule on a log
    grid, and the lower limit is lowered until the analytic tail bound is
    below settings.rel_tol of a pilot estimate.

    Args:
        thetas: Array (m, k, d) of m theta sets, or (k, d) for one.
        times: k strictly increasing positive times.
        alpha, b, p: Model parameters.
        rng: Random generator.
        settings: Monte Carlo settings.

    Returns:
        LimitCF with m values, their standard errors and the lower limit used.

    Raises:
        RegimeError: If alpha*kappa >= 1 (the exponent diverges).
    """
    settings = settings or LimitCFSettings()
    validate_bp(b, p)
    validate_alpha(alpha)
    ak = alpha * kappa(Model.SRS, b, p)
    if ak >= 1.0 - REGIME_TOL:
        raise RegimeError(f"subcritical limit needs alpha*kappa < 1, got {ak:.6g}")
    ts = _check_times(times)
    th = _theta_sets(thetas, ts.size)
    theta_norms = np.linalg.norm(th, axis=2).sum(axis=1)
    active = theta_norms > 0
    values = np.ones(th.shape[0], dtype=complex)
    se = np.zeros(th.shape[0])
    if not active.any():
        return LimitCF(values=values, se=se, x_min=settings.x_min)

    th_active = th[active]
    grid = _integration_grid(settings.x_min, ts, p, settings.grid_points)
    pilot = _path_integrals(th_active, ts, alpha, b, p, grid, settings.pilot_paths, rng).mean(axis=1)
    x_min = settings.x_min
    for norm, level in zip(theta_norms[active], pilot):
        while (
            truncation_bound(x_min, norm, ts[-1], alpha, b, p, settings.bound_constant)
            > settings.rel_tol * level
        ):
            if x_min / 10.0 < settings.x_floor:
                logger.warning(
                    "truncation floor %.1e reached before relative tolerance %.3g",
                    settings.x_floor, settings.rel_tol,
                )
                break
            x_min /= 10.0

    grid = _integration_grid(x_min, ts, p, settings.grid_points)
    j = _path_integrals(th_active, ts, alpha, b, p, grid, settings.paths, rng)
    exponent = j.mean(axis=1)
    spread = j.std(axis=1, ddof=1) / math.sqrt(settings.paths)
    values[active] = np.exp(-exponent)
    se[active] = np.exp(-exponent) * spread
    logger.debug("subcritical CF with x_min=%.1e over %d grid points", x_min, grid.size)
    return LimitCF(values=values, se=se, x_min=x_min)


def critical_constant(alpha: float, b: float, p: float, z1_alpha_moment: float) -> float:
    """((1-p)/(b+1)) E[Z_1^alpha], the Levy exponent per unit time and unit ||theta||^alpha."""
    return (1.0 - p) / (b + 1.0) * z1_alpha_moment


def _require_critical(alpha: float, b: float, p: float) -> None:
    validate_bp(b, p)
    validate_alpha(alpha)
    ak = alpha * kappa(Model.SRS, b, p)
    if abs(ak - 1.0) >= REGIME_TOL:
        raise RegimeError(f"critical limit needs alpha*kappa = 1, got {ak:.12g}")


def critical_limit_cf(
    thetas, times, alpha: float, b: float, p: float, z1_alpha_moment: float
) -> np.ndarray:
    """
    Limit characteristic function of (n ln n)^{-1/alpha} S_{floor(n^t)} at alpha*kappa = 1.

    -log CF = const * sum_j (t_j - t_{j-1}) ||sum_{i>=j} theta_i||^alpha with t_0 = 0.

    Returns:
        Complex array with one value per theta set.

    Raises:
        RegimeError: If alpha*kappa differs from 1 by 1e-9 or more.
    """
    _require_critical(alpha, b, p)
    ts = _check_times(times)
    th = _theta_sets(thetas, ts.size)
    tail = np.cumsum(th[:, ::-1], axis=1)[:, ::-1]
    widths = np.diff(np.concatenate([[0.0], ts]))
    exponent = critical_constant(alpha, b, p, z1_alpha_moment) * (
        np.linalg.norm(tail, axis=2) ** alpha @ widths
    )
    return np.exp(-exponent).astype(complex)


def critical_gaussian_scale(b: float, p: float) -> float:
    """
    Standard deviation per unit time of the critical Gaussian limit (alpha = 2).

    sqrt(2 (1-p)/(b+1) E[Z_1^2]); equals sqrt(4p^2/(1-p)) when b = 1-2p.
    """
    _require_critical(2.0, b, p)
    return math.sqrt(2.0 * critical_constant(2.0, b, p, z1_moments(b, p)["z1_second_moment"]))


def estimate_z1_alpha_moment(
    alpha: float, b: float, p: float, n: int, replicas: int, rng: np.random.Generator
) -> Tuple[float, float]:
    """
    Monte Carlo E[(|c_{1,n}|/n^kappa)^alpha] with its standard error.

    alpha = 0 returns (1, 0) exactly.
    """
    validate_bp(b, p)
    if n < 1 or replicas < 1:
        raise ParameterError(f"n and replicas must be >= 1, got n={n}, replicas={replicas}")
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    values = sample_root_cluster_scaled(n, b, p, rng, size=replicas) ** alpha
    if replicas < 2:
        return float(values[0]), math.inf
    return float(values.mean()), batch_means_se(values)


def _require_supercritical(alpha: float, b: float, p: float) -> float:
    validate_bp(b, p)
    validate_alpha(alpha)
    ak = alpha * kappa(Model.SRS, b, p)
    if ak <= 1.0 + REGIME_TOL:
        raise RegimeError(f"supercritical limit needs alpha*kappa > 1, got {ak:.6g}")
    return ak


def sample_supercritical_weights_batch(
    alpha: float, b: float, p: float, n: int, replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """
    Joint cluster weights (|C_{i,n}|/n^kappa)_i indexed by root label, per replica.

    Returns:
        Array (replicas, n) with zeros where node i is not a cluster root.
    """
    _require_supercritical(alpha, b, p)
    sizes = sample_cluster_sizes_batch(n, b, p, replicas, rng)
    return sizes / n ** kappa(Model.SRS, b, p)


def sample_supercritical_Z(config: SRSConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Approximate Z = sum_i Z_i xi_i from one percolated tree of n nodes.

    Raises:
        RegimeError: If alpha*kappa <= 1.
    """
    _require_supercritical(config.alpha, config.b, config.p)
    forest = percolate(grow_discrete(n, config.b, rng), config.p, rng)
    weights = forest.sizes / n ** config.kappa
    xi = sample_isotropic_stable(config.stable, rng, size=forest.n_clusters)
    return weights @ xi


def supercritical_tail_bound(I: int, alpha: float, b: float, p: float, z1_alpha: float) -> float:
    """sum_{i > I} E[Z_i^alpha] = (1-p) E[Z_1^alpha] sum_{i > I} E[beta_i^{alpha kappa}]."""
    ak = _require_supercritical(alpha, b, p)
    return (1.0 - p) * z1_alpha * beta_moment_tail(I, b, ak)


def supercritical_truncation(
    alpha: float, b: float, p: float, z1_alpha: float, tol: float, max_index: int = 10**12
) -> int:
    """
    Smallest I with sum_{i > I} E[Z_i^alpha] <= tol.

    Raises:
        RegimeError: If alpha*kappa <= 1.
        ParameterError: If tol <= 0 or no I up to max_index is enough.
    """
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    if supercritical_tail_bound(1, alpha, b, p, z1_alpha) <= tol:
        return 1
    hi = 2
    while supercritical_tail_bound(hi, alpha, b, p, z1_alpha) > tol:
        hi *= 2
        if hi > max_index:
            raise ParameterError(f"tail above {tol} up to index {max_index}")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if supercritical_tail_bound(mid, alpha, b, p, z1_alpha) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def empirical_weight_tail(weights: np.ndarray, alpha: float, I: int) -> float:
    """Mean over replicas of sum_{i > I} weight_i^alpha."""
    w = np.asarray(weights, dtype=float)
    if w.ndim == 1:
        w = w[None]
    return float((w[:, I:] ** alpha).sum(axis=1).mean())


def size_statistic(values, alpha: float, statistic: Optional[str] = None) -> float:
    """Median of |S| for alpha <= 1 (no mean exists), mean otherwise, unless `statistic` says."""
    v = np.asarray(values, dtype=float)
    kind = statistic or ("median" if alpha <= 1.0 else "mean")
    if kind == "median":
        return float(np.median(v))
    if kind == "mean":
        if alpha <= 1.0:
            raise UsageError(f"E|S_n| is infinite for alpha={alpha}")
        return float(v.mean())
    raise UsageError(f"unknown statistic {kind!r}")


def scaling_exponent(
    config: SRSConfig,
    n_grid: Sequence[int],
    replicas: int,
    rng: np.random.Generator,
    statistic: Optional[str] = None,
) -> SlopeFit:
    """
    Log-log slope of a size statistic of |S_n| against n.

    |S_n| is drawn as (sum_i |c_{i,n}|^alpha)^{1/alpha} |xi| with all grid
    points read off the same trees.

    Raises:
        UsageError: On fewer than four grid points or a non-increasing grid.
    """
    grid = np.asarray(n_grid, dtype=np.int64)
    if grid.size < 4 or np.any(np.diff(grid) <= 0) or grid[0] < 1:
        raise UsageError("n_grid needs at least four strictly increasing horizons >= 1")
    sums = sample_cluster_power_sums(config.alpha, config.b, config.p, grid, replicas, rng)
    positions = stable_from_power_sums(sums, config.stable, rng)
    norms = np.linalg.norm(positions, axis=2)
    stat = [size_statistic(norms[:, j], config.alpha, statistic) for j in range(grid.size)]
    fit = loglog_slope(grid, stat)
    logger.info("SRS alpha=%s b=%s p=%s slope=%.4f", config.alpha, config.b, config.p, fit.slope)
    return fit
