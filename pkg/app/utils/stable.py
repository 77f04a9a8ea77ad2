"""
Isotropic alpha-stable sampling and empirical characteristic functions.

An isotropic stable vector X in R^d with index alpha satisfies
E[exp(i<theta, X>)] = exp(-||theta||^alpha). For alpha < 2 it is drawn as a
sub-Gaussian vector sqrt(2A) G, with A one-sided (alpha/2)-stable and G a
standard Gaussian vector; for alpha == 2 it is sqrt(2) G.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ParameterError, UsageError

logger = logging.getLogger(__name__)


class StableParams(BaseModel):
    """Index and dimension of an isotropic stable law."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0.0, le=2.0, description="Stability index")
    dim: int = Field(1, ge=1, description="Dimension d")


@dataclass(frozen=True)
class CFEstimate:
    """Empirical characteristic function value and its standard error."""

    value: complex
    se: float


def sample_positive_stable(
    index: float, rng: np.random.Generator, size: Optional[int] = None
) -> Union[float, np.ndarray]:
    """
    Draw one-sided stable variates with Laplace transform exp(-lambda^index).

    Uses Kanter's representation from a uniform angle U on (0, pi) and an
    independent standard exponential E.

    Args:
        index: Stability index in (0, 1).
        rng: Random generator.
        size: Number of variates; None returns a scalar.

    Returns:
        Strictly positive variate(s).

    Raises:
        ParameterError: If index lies outside (0, 1).
    """
    if not 0.0 < index < 1.0:
        raise ParameterError(f"positive stable index must lie in (0, 1), got {index}")
    u = rng.uniform(0.0, np.pi, size=size)
    e = rng.exponential(1.0, size=size)
    a = index
    part = np.sin(a * u) / np.sin(u) ** (1.0 / a)
    tail = (np.sin((1.0 - a) * u) / e) ** ((1.0 - a) / a)
    out = part * tail
    # The representation is a.s. positive; guard the u -> 0 underflow edge.
    out = np.maximum(out, np.finfo(float).tiny)
    if size is None:
        return float(out)
    return out


def sample_isotropic_stable(
    params: StableParams, rng: np.random.Generator, size: Optional[int] = None
) -> np.ndarray:
    """
    Draw isotropic stable vectors with CF exp(-||theta||^alpha).

    Args:
        params: Index and dimension.
        rng: Random generator.
        size: Number of vectors; None returns a single vector of shape (d,).

    Returns:
        Array of shape (d,) or (size, d).
    """
    d = params.dim
    shape = (d,) if size is None else (size, d)
    g = rng.standard_normal(shape)
    if params.alpha == 2.0:
        return np.sqrt(2.0) * g
    a = sample_positive_stable(params.alpha / 2.0, rng, size=size)
    scale = np.sqrt(2.0 * np.asarray(a))
    if size is None:
        return scale * g
    return scale[:, None] * g


def empirical_cf(samples, theta) -> CFEstimate:
    """
    Empirical characteristic function (1/N) sum exp(i<theta, x_k>).

    Args:
        samples: Array of shape (N,) or (N, d).
        theta: Scalar or vector of length d.

    Returns:
        CFEstimate with standard error 1/sqrt(N).

    Raises:
        UsageError: On empty input or mismatched dimensions.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise UsageError("empirical_cf needs at least one sample")
    if x.ndim == 1:
        x = x[:, None]
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if th.shape[0] != x.shape[1]:
        raise UsageError(
            f"theta has dimension {th.shape[0]} but samples have dimension {x.shape[1]}"
        )
    n = x.shape[0]
    if not np.any(th):
        return CFEstimate(value=complex(1.0, 0.0), se=1.0 / np.sqrt(n))
    phase = x @ th
    value = complex(np.mean(np.cos(phase)), np.mean(np.sin(phase)))
    return CFEstimate(value=value, se=1.0 / np.sqrt(n))


def stable_cf(theta, alpha: float) -> float:
    """Exact CF exp(-||theta||^alpha) of the isotropic law."""
    return float(np.exp(-np.linalg.norm(np.atleast_1d(theta)) ** alpha))
