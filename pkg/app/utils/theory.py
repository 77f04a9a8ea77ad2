"""
Closed-form constants, thresholds, covariance kernels and moment formulas.

Models:
    ERW1: reinforced elephant random walk (weights grow on memory times only),
          threshold p_* = 1/(2+b), kappa = (b+1)p/(bp+1).
    ERW2: strongly reinforced elephant random walk (weights always grow),
          threshold p_** = (1-b)/2, kappa = (b+p)/(b+1).
    SRS:  strongly reinforced shark random swim with alpha-stable steps,
          regime decided by alpha*kappa versus 1, kappa = (b+p)/(b+1).

All functions are pure. Gamma and Beta functions come from scipy.special.
"""
import logging
import math
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import linalg, special

from ..errors import ParameterError, RegimeError

logger = logging.getLogger(__name__)

CRITICAL_TOL = 1e-12


class Model(str, Enum):
    """Walk families with a phase transition."""

    ERW1 = "erw1"
    ERW2 = "erw2"
    SRS = "srs"


class Regime(str, Enum):
    SUB = "sub"
    CRITICAL = "critical"
    SUPER = "super"


class RegimeReport(BaseModel):
    """Classified regime plus the constants that go with it."""

    model: Model
    b: float
    p: float
    alpha: Optional[float] = None
    regime: Regime
    threshold: float = Field(..., description="Critical p (ERW) or 1 (SRS, compared with alpha*kappa)")
    kappa: float
    extra: Dict[str, float] = Field(default_factory=dict)


def validate_bp(b: float, p: float) -> None:
    """
    Check the reinforcement and memory parameters.

    Raises:
        ParameterError: If b < 0 or p is outside (0, 1).
    """
    if not (isinstance(b, (int, float)) and math.isfinite(b) and b >= 0):
        raise ParameterError(f"b must be a finite real >= 0, got {b}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must lie in (0, 1), got {p}")


def validate_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 2.0:
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")


def kappa(model: Model, b: float, p: float) -> float:
    """Scaling exponent of the model."""
    model = Model(model)
    if model is Model.ERW1:
        return (b + 1.0) * p / (b * p + 1.0)
    return (b + p) / (b + 1.0)


def threshold(model: Model, b: float) -> float:
    """Critical memory parameter (ERW) or the critical value of alpha*kappa (SRS)."""
    model = Model(model)
    if model is Model.ERW1:
        return 1.0 / (2.0 + b)
    if model is Model.ERW2:
        return (1.0 - b) / 2.0
    return 1.0


def _classify(value: float, crit: float) -> Regime:
    if abs(value - crit) <= CRITICAL_TOL:
        return Regime.CRITICAL
    return Regime.SUB if value < crit else Regime.SUPER


def regime(model: Model, b: float, p: float, alpha: Optional[float] = None) -> RegimeReport:
    """
    Classify (b, p[, alpha]) and collect the theoretical constants.

    Args:
        model: ERW1, ERW2 or SRS.
        b: Reinforcement parameter.
        p: Memory parameter.
        alpha: Stability index, required for SRS.

    Returns:
        RegimeReport with threshold, kappa, regime and extra constants.

    Raises:
        ParameterError: On invalid parameters or missing alpha for SRS.
    """
    model = Model(model)
    validate_bp(b, p)
    k = kappa(model, b, p)
    crit = threshold(model, b)
    extra: Dict[str, float] = {}

    if model is Model.SRS:
        if alpha is None:
            raise ParameterError("alpha is required for the SRS model")
        validate_alpha(alpha)
        ak = alpha * k
        reg = _classify(ak, 1.0)
        extra["alpha_kappa"] = ak
        extra["scaling_exponent"] = 1.0 / alpha if reg is Regime.SUB else k
        if reg is Regime.CRITICAL and alpha == 2.0:
            extra["critical_scale"] = srs_critical_scale(p)
    else:
        reg = _classify(p, crit)
        lam1, lam2 = (b * p + 1.0, (b + 1.0) * p) if model is Model.ERW1 else (b + 1.0, b + p)
        extra["lambda1"] = lam1
        extra["lambda2"] = lam2
        extra["eigen_ratio"] = lam2 / lam1
        extra["scaling_exponent"] = 0.5 if reg is not Regime.SUPER else k
        if reg is Regime.CRITICAL:
            extra["critical_prefactor"] = critical_prefactor(model, p)

    logger.debug("regime %s b=%s p=%s alpha=%s -> %s", model.value, b, p, alpha, reg.value)
    return RegimeReport(
        model=model, b=b, p=p, alpha=alpha, regime=reg, threshold=crit, kappa=k, extra=extra
    )


def _require_subcritical(model: Model, b: float, p: float) -> None:
    validate_bp(b, p)
    crit = threshold(model, b)
    if p >= crit - CRITICAL_TOL:
        raise RegimeError(
            f"{model.value} covariance needs p < {crit:.6g} (subcritical), got p={p}"
        )


def _check_times(s: float, t: float) -> None:
    if s <= 0:
        raise ParameterError(f"s must be positive, got {s}")
    if s > t:
        raise ParameterError(f"covariance needs s <= t, got s={s}, t={t}")


def cov_erw1(s: float, t: float, b: float, p: float) -> float:
    """
    Limit covariance E[W_s W_t] of the subcritical reinforced ERW.

    Raises:
        RegimeError: If p >= 1/(2+b).
        ParameterError: If s > t or s <= 0.
    """
    _require_subcritical(Model.ERW1, b, p)
    _check_times(s, t)
    k = kappa(Model.ERW1, b, p)
    lead = (b * p + 1.0) / ((1.0 - (2.0 + b) * p) * (b + 1.0))
    linear = (p * b**3 + (3.0 * p - p**2) * b**2 + b) / ((b * p + 1.0) ** 2 * (b + 1.0))
    return lead * s * (t / s) ** k + linear * s


def cov_erw2(s: float, t: float, b: float, p: float) -> float:
    """
    Limit covariance E[W_s W_t] of the subcritical strongly reinforced ERW.

    Raises:
        RegimeError: If p >= (1-b)/2.
        ParameterError: If s > t or s <= 0.
    """
    _require_subcritical(Model.ERW2, b, p)
    _check_times(s, t)
    k = kappa(Model.ERW2, b, p)
    lead = (1.0 - b**2) * p / ((1.0 - b - 2.0 * p) * (b + p))
    linear = (1.0 + p) * b / (b + p)
    return lead * s * (t / s) ** k + linear * s


def cov_matrix(model: Model, times, b: float, p: float) -> np.ndarray:
    """Covariance kernel evaluated on a grid of increasing times."""
    model = Model(model)
    fn = cov_erw1 if model is Model.ERW1 else cov_erw2
    ts = [float(t) for t in times]
    k = len(ts)
    out = np.empty((k, k))
    for a in range(k):
        for c in range(k):
            lo, hi = min(ts[a], ts[c]), max(ts[a], ts[c])
            out[a, c] = fn(lo, hi, b, p)
    return out


def critical_prefactor(model: Model, p: float) -> float:
    """
    Brownian scaling constant at criticality.

    ERW1 (b = 1/p - 2): sqrt(p/(1-p)); ERW2 (b = 1-2p): sqrt(2p^2/(1-p)).
    """
    model = Model(model)
    if model is Model.ERW1:
        if not 0.0 < p <= 0.5:
            raise ParameterError(f"critical ERW1 needs 0 < p <= 1/2, got {p}")
        return math.sqrt(p / (1.0 - p))
    if model is Model.ERW2:
        if not 0.0 < p <= 0.5:
            raise ParameterError(f"critical ERW2 needs 0 < p <= 1/2, got {p}")
        return math.sqrt(2.0 * p**2 / (1.0 - p))
    raise ParameterError("critical_prefactor is defined for ERW1 and ERW2")


def critical_b(model: Model, p: float) -> float:
    """Reinforcement parameter that makes p critical."""
    model = Model(model)
    if model is Model.ERW1:
        return 1.0 / p - 2.0
    return 1.0 - 2.0 * p


def srs_critical_scale(p: float) -> float:
    """Gaussian scaling factor sqrt(4p^2/(1-p)) of the critical SRS at alpha=2."""
    return math.sqrt(4.0 * p**2 / (1.0 - p))


def second_moment_constant(b: float, p: float) -> float:
    """c = (b+1)(b+2p)/(b+p), the limit of E[Y^2] e^{-2(b+p)t}."""
    return (b + 1.0) * (b + 2.0 * p) / (b + p)


def branching_moments(t: float, b: float, p: float) -> Tuple[float, float]:
    """
    First two moments of the cluster weight process Y_1^{(p)}(t).

    Y jumps at rate Y by b+1 (probability p) or b. Then
    E[Y(t)] = e^{mt} and E[Y(t)^2] = c e^{2mt} - (c-1) e^{mt} with m = b+p,
    which equals 1 at t = 0.

    Raises:
        ParameterError: If t < 0.
    """
    validate_bp(b, p)
    if t < 0:
        raise ParameterError(f"t must be non-negative, got {t}")
    if t == 0:
        return 1.0, 1.0
    m = b + p
    c = second_moment_constant(b, p)
    e1 = math.exp(m * t)
    return e1, c * e1 * e1 - (c - 1.0) * e1


def branching_moment(t: float, order: int, b: float, p: float) -> float:
    """
    Moment E[Y_1^{(p)}(t)^order] from the generator's linear moment system.

    Applying the generator to x^l gives
    dM_l/dt = sum_{j<l} C(l, j) mu_{l-j} M_{j+1}, mu_r = (1-p) b^r + p (b+1)^r,
    which is solved with a matrix exponential.
    """
    validate_bp(b, p)
    if order < 1:
        raise ParameterError(f"order must be >= 1, got {order}")
    if t < 0:
        raise ParameterError(f"t must be non-negative, got {t}")
    mu = [(1.0 - p) * b**r + p * (b + 1.0) ** r for r in range(order + 1)]
    gen = np.zeros((order, order))
    for ell in range(1, order + 1):
        for j in range(ell):
            gen[ell - 1, j] += math.comb(ell, j) * mu[ell - j]
    return float((linalg.expm(gen * t) @ np.ones(order))[order - 1])


def tree_y_mean(t: float, b: float) -> float:
    """E[Y(t)] = e^{(b+1)t} for the total weight of the whole tree."""
    return math.exp((b + 1.0) * t)


def w_constants(b: float, p: float) -> Dict[str, float]:
    """
    Constants of the martingale limits.

    W = lim e^{-(b+1)t} Y(t) is Gamma(shape 1/(b+1), rate 1/(b+1));
    W_i = lim e^{-(b+p)t} Y_i^{(p)}(t) has mean 1 and second moment
    (b+1)(b+2p)/(b+p).
    """
    validate_bp(b, p)
    r = 1.0 / (b + 1.0)
    return {
        "w_shape": r,
        "w_rate": r,
        "w_mean": 1.0,
        "w_variance": b + 1.0,
        "wi_mean": 1.0,
        "wi_second_moment": second_moment_constant(b, p),
    }


def w_power_moment(q: float, b: float) -> float:
    """E[(W/(b+1))^q] = Gamma(1/(b+1)+q)/Gamma(1/(b+1))."""
    r = 1.0 / (b + 1.0)
    return float(np.exp(special.gammaln(r + q) - special.gammaln(r)))


def z1_moments(b: float, p: float) -> Dict[str, float]:
    """
    Moments of the root-cluster limits.

    E[Z1hat] = Gamma(1/(b+1)) / Gamma(1 + p/(b+1)),
    E[Z1hat^2] = ((b+1)^2/(b+p)) Gamma(1/(b+1)) / Gamma((b+2p)/(b+1)),
    Z1 = (p/(b+p)) Z1hat.
    """
    validate_bp(b, p)
    r = 1.0 / (b + 1.0)
    lg = special.gammaln
    m1 = math.exp(lg(r) - lg(1.0 + p / (b + 1.0)))
    m2 = (b + 1.0) ** 2 / (b + p) * math.exp(lg(r) - lg((b + 2.0 * p) / (b + 1.0)))
    scale = p / (b + p)
    return {
        "z1hat_mean": m1,
        "z1hat_second_moment": m2,
        "z1_mean": scale * m1,
        "z1_second_moment": scale**2 * m2,
    }


def root_cluster_mean(n: int, b: float, p: float) -> float:
    """
    Exact E[Y_1(tau_n)] along the discrete growth.

    prod_{k<n} (k + p/(b+1)) / (k - b/(b+1)), a ratio of Gamma functions.
    """
    validate_bp(b, p)
    lg = special.gammaln
    u, v = p / (b + 1.0), b / (b + 1.0)
    return math.exp(lg(n + u) - lg(1.0 + u) + lg(1.0 - v) - lg(n - v))


def half_edge_ratio(b: float, p: float) -> float:
    """Asymptotic ratio H_1 / Y_1 = (1-p)/(b+p)."""
    return (1.0 - p) / (b + p)


def cluster_y_from_size(size, half_edges, b: float):
    """Cluster weight Y = b(size - 2 + H) + size."""
    return b * (np.asarray(size) - 2 + np.asarray(half_edges)) + np.asarray(size)


def root_cluster_size(y, half_edges, b: float):
    """Invert the cluster weight: size = (Y - bH + 2b)/(b+1)."""
    return (np.asarray(y) - b * np.asarray(half_edges) + 2.0 * b) / (b + 1.0)


def cluster_count_mean(n: int, p: float) -> float:
    """E[number of clusters] after percolating n nodes: 1 + (n-1)(1-p)."""
    return 1.0 + (n - 1) * (1.0 - p)


def birth_time_bounds(
    n: int, i: int, b: float, p: float, eps: float = 0.0
) -> Tuple[float, float]:
    """
    Deterministic bounds t-, t+ around the birth time of cluster i.

    t+ = (ln n - ln(i-1) + ln(1-p) + eps)/(b+1), +inf when i = 1;
    t- = (ln n - ln(i+1) + ln(1-p) - eps)/(b+1), returned unclamped.

    Raises:
        ParameterError: If i < 1, i > n or eps < 0.
    """
    validate_bp(b, p)
    if i < 1:
        raise ParameterError(f"i must be >= 1, got {i}")
    if i > n:
        raise ParameterError(f"i must be <= n, got i={i}, n={n}")
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    base = math.log(n) + math.log(1.0 - p)
    t_minus = (base - math.log(i + 1) - eps) / (b + 1.0)
    t_plus = math.inf if i == 1 else (base - math.log(i - 1) + eps) / (b + 1.0)
    return t_minus, t_plus


def beta_moment(i: int, b: float, q: float) -> float:
    """
    E[beta_i^q] for beta_i ~ Beta(1/(b+1), i-1), with Beta(r, 0) = 1.

    Raises:
        ParameterError: If i < 1 or q < 0.
    """
    if i < 1:
        raise ParameterError(f"i must be >= 1, got {i}")
    if q < 0:
        raise ParameterError(f"q must be >= 0, got {q}")
    if i == 1:
        return 1.0
    r, s = 1.0 / (b + 1.0), float(i - 1)
    return float(np.exp(special.betaln(r + q, s) - special.betaln(r, s)))


def beta_moment_tail(I: int, b: float, q: float) -> float:
    """
    Tail sum sum_{i > I} E[beta_i^q] for q > 1, I >= 1.

    Uses sum_{j >= J} Gamma(r+j)/Gamma(r+q+j) = Gamma(r+J)/((q-1) Gamma(r+q+J-1)).
    """
    if q <= 1:
        raise ParameterError(f"tail sum diverges unless q > 1, got q={q}")
    if I < 1:
        raise ParameterError(f"I must be >= 1, got {I}")
    r = 1.0 / (b + 1.0)
    lg = special.gammaln
    return float(
        np.exp(lg(r + q) - lg(r) + lg(r + I) - lg(r + q + I - 1.0)) / (q - 1.0)
    )


def zi_alpha_moment(i: int, alpha: float, b: float, p: float, z1_alpha: float) -> float:
    """E[Z_i^alpha] = (1-p) E[beta_i^{alpha kappa}] E[Z_1^alpha] for i >= 2."""
    if i == 1:
        return z1_alpha
    k = kappa(Model.SRS, b, p)
    return (1.0 - p) * beta_moment(i, b, alpha * k) * z1_alpha


def zi_alpha_moment_summable(alpha: float, b: float, p: float) -> bool:
    """sum_i E[Z_i^alpha] < inf iff alpha * kappa > 1."""
    validate_bp(b, p)
    validate_alpha(alpha)
    return alpha * kappa(Model.SRS, b, p) > 1.0
