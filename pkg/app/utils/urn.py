"""
Three-color urns with random replacement for both elephant random walk
models, and the two-color mass urn behind the cluster label eta(n, i).

Colors are ordered (black, green, red). Black mass records reinforced right
steps, green the unreinforced right steps and red every left step. The urn
starts with a single green or red ball with probability 1/2 each, and the
state at time k has seen k-1 draws.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ParameterError, SimulationError
from .theory import validate_bp

logger = logging.getLogger(__name__)

BLACK, GREEN, RED = 0, 1, 2


class UrnModel(str, Enum):
    """Which walk the urn encodes."""

    REINFORCED_ERW = "reinforced"
    STRONG_ERW = "strong"


@dataclass(frozen=True)
class ReplacementRule:
    """
    Random replacement law.

    Attributes:
        model: The encoded walk.
        b: Reinforcement parameter.
        p: Memory parameter.
        outcomes: Array (3, K, 3); outcomes[j, k] is the added (B, G, R) mass
            for the k-th outcome when color j is drawn.
        probs: Array (3, K) of outcome probabilities per drawn color.
    """

    model: UrnModel
    b: float
    p: float
    outcomes: np.ndarray
    probs: np.ndarray


@dataclass
class UrnState:
    """Color masses (B, G, R) and the number of draws so far."""

    masses: np.ndarray
    draws: int = 0

    @property
    def total(self) -> float:
        return float(self.masses.sum())


@dataclass(frozen=True)
class EigenData:
    """Closed-form eigenvalues, right eigenvectors (columns) and dual left eigenvectors."""

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def ratio(self) -> float:
        """lambda2 / lambda1; the walk is superdiffusive iff this exceeds 1/2."""
        return float(self.eigenvalues[1] / self.eigenvalues[0])


def replacement_rule(model: UrnModel, b: float, p: float) -> ReplacementRule:
    """
    Build the per-color replacement distributions.

    Reinforced model: a drawn right-step color (black or green) adds b+1 black
    with probability p, otherwise one green or one red with probability
    (1-p)/2 each; a drawn red adds b+1 red with probability p, otherwise one
    green or one red.

    Strong model: a drawn black or green always adds b black, plus one green
    with probability p and otherwise one green or one red; a drawn red always
    adds b red, plus one red with probability p and otherwise one red or one
    green.
    """
    model = UrnModel(model)
    validate_bp(b, p)
    q = (1.0 - p) / 2.0
    probs = np.array([[p, q, q]] * 3)
    if model is UrnModel.REINFORCED_ERW:
        right = [(b + 1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
        left = [(0.0, 0.0, b + 1.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
    else:
        right = [(b, 1.0, 0.0), (b, 1.0, 0.0), (b, 0.0, 1.0)]
        left = [(0.0, 0.0, b + 1.0), (0.0, 0.0, b + 1.0), (0.0, 1.0, b)]
    outcomes = np.array([right, right, left], dtype=float)
    return ReplacementRule(model=model, b=b, p=p, outcomes=outcomes, probs=probs)


def mean_matrix(rule: ReplacementRule) -> np.ndarray:
    """Mean replacement matrix derived from the rule; column j is E[added | color j]."""
    return np.einsum("jk,jki->ij", rule.probs, rule.outcomes)


def theoretical_mean_matrix(model: UrnModel, b: float, p: float) -> np.ndarray:
    """Closed-form mean replacement matrix A."""
    model = UrnModel(model)
    q = (1.0 - p) / 2.0
    if model is UrnModel.REINFORCED_ERW:
        c = (b + 1.0) * p
        return np.array([[c, c, 0.0], [q, q, q], [q, q, c + q]])
    return np.array(
        [
            [b, b, 0.0],
            [(1.0 + p) / 2.0, (1.0 + p) / 2.0, q],
            [q, q, b + (1.0 + p) / 2.0],
        ]
    )


def second_moment_matrix(rule: ReplacementRule) -> np.ndarray:
    """
    sum_j v1_j E[added added^T | color j], weighted by the leading right eigenvector.
    """
    v1 = eigen_data(rule.model, rule.b, rule.p).right[:, 0]
    per_color = np.einsum("jk,jka,jkc->jac", rule.probs, rule.outcomes, rule.outcomes)
    return np.einsum("j,jac->ac", v1, per_color)


def theoretical_second_moment_matrix(model: UrnModel, b: float, p: float) -> np.ndarray:
    """Closed form of `second_moment_matrix` for both models."""
    model = UrnModel(model)
    if model is UrnModel.REINFORCED_ERW:
        g = (b + 1.0) ** 2 * p / 2.0
        return np.diag([g, (1.0 - p) / 2.0, g + (1.0 - p) / 2.0])
    return 0.25 * np.array(
        [
            [2.0 * b**2, b * (1.0 + p), b * (1.0 - p)],
            [b * (1.0 + p), 2.0, b * (1.0 - p)],
            [b * (1.0 - p), b * (1.0 - p), 2.0 * (b**2 + (1.0 + p) * b + 1.0)],
        ]
    )


def eigen_data(model: UrnModel, b: float, p: float) -> EigenData:
    """
    Closed-form eigen decomposition of the mean replacement matrix.

    Right eigenvectors are L1-normalised and stored as columns; the left
    eigenvectors (rows) form the dual basis, u_i . v_j = delta_ij.
    """
    model = UrnModel(model)
    validate_bp(b, p)
    if model is UrnModel.REINFORCED_ERW:
        m = b * p + 1.0
        lam = np.array([m, (b + 1.0) * p, 0.0])
        v = [
            np.array([(b + 1.0) * p, 1.0 - p, m]) / (2.0 * m),
            np.array([-1.0, 0.0, 1.0]) / 2.0,
            np.array([-1.0, 1.0, 0.0]) / 2.0,
        ]
        u = [
            np.array([1.0, 1.0, 1.0]),
            np.array([-1.0, -1.0, 1.0]),
            np.array([p - 1.0, (2.0 * b + 1.0) * p + 1.0, p - 1.0]) / m,
        ]
    else:
        lam = np.array([b + 1.0, b + p, 0.0])
        v = [
            np.array([b, 1.0, b + 1.0]) / (2.0 * (b + 1.0)),
            np.array([b, p, -(b + p)]) / (2.0 * (b + p)),
            np.array([1.0, -1.0, 0.0]) / 2.0,
        ]
        u = [
            np.array([1.0, 1.0, 1.0]),
            np.array([1.0, 1.0, -1.0]),
            np.array([(1.0 + p) * b + 2.0 * p, -(2.0 * b + 1.0 + p) * b, (1.0 - p) * b])
            / ((b + 1.0) * (b + p)),
        ]
    return EigenData(eigenvalues=lam, right=np.column_stack(v), left=np.vstack(u))


def initial_state(rng: np.random.Generator) -> UrnState:
    """One green or one red ball with probability 1/2 each."""
    masses = np.zeros(3)
    masses[GREEN if rng.random() < 0.5 else RED] = 1.0
    return UrnState(masses=masses)


def draw(state: UrnState, rule: ReplacementRule, rng: np.random.Generator) -> np.ndarray:
    """
    Draw a color proportionally to mass and apply a sampled replacement.

    Returns:
        The added mass triple.
    """
    u = rng.random() * state.total
    color = int(np.searchsorted(np.cumsum(state.masses), u, side="right"))
    color = min(color, RED)
    k = int(np.searchsorted(np.cumsum(rule.probs[color]), rng.random(), side="right"))
    k = min(k, rule.probs.shape[1] - 1)
    added = rule.outcomes[color, k]
    state.masses = state.masses + added
    state.draws += 1
    return added


def simulate_urn(rule: ReplacementRule, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Mass path (B_k, G_k, R_k) for k = 1..n.

    Returns:
        Array of shape (n, 3); row k-1 is the state after k-1 draws.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    state = initial_state(rng)
    path = np.empty((n, 3))
    path[0] = state.masses
    for k in range(1, n):
        draw(state, rule, rng)
        path[k] = state.masses
    return path


def _record_times(times: Sequence[int], n: int) -> np.ndarray:
    ts = np.asarray(sorted(set(int(t) for t in times)), dtype=int)
    if ts.size == 0 or ts[0] < 1 or ts[-1] > n:
        raise ParameterError(f"record times must lie in 1..{n}")
    return ts


def simulate_urn_batch(
    rule: ReplacementRule,
    n: int,
    replicas: int,
    rng: np.random.Generator,
    record: Optional[Sequence[int]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Run independent urns side by side.

    Args:
        rule: Replacement law.
        n: Horizon (number of times).
        replicas: Number of independent urns.
        rng: Random generator.
        record: Times in 1..n at which to record masses; defaults to (n,).

    Returns:
        (times, masses) with masses of shape (replicas, len(times), 3).
    """
    if n < 1 or replicas < 1:
        raise ParameterError(f"n and replicas must be >= 1, got n={n}, replicas={replicas}")
    times = _record_times(record if record is not None else (n,), n)
    out = np.empty((replicas, times.size, 3))
    masses = np.zeros((replicas, 3))
    start_green = rng.random(replicas) < 0.5
    masses[start_green, GREEN] = 1.0
    masses[~start_green, RED] = 1.0
    cum_probs = np.cumsum(rule.probs, axis=1)
    last = rule.probs.shape[1] - 1
    slot = 0
    if times[0] == 1:
        out[:, 0] = masses
        slot = 1
    for k in range(2, n + 1):
        cum = np.cumsum(masses, axis=1)
        u = rng.random(replicas) * cum[:, 2]
        color = np.minimum((u[:, None] >= cum).sum(axis=1), RED)
        v = rng.random(replicas)
        outcome = np.minimum((v[:, None] >= cum_probs[color]).sum(axis=1), last)
        masses += rule.outcomes[color, outcome]
        if slot < times.size and times[slot] == k:
            out[:, slot] = masses
            slot += 1
    return times, out


def position_from_urn(rule: ReplacementRule, masses, n: int):
    """
    Walk position encoded by the urn masses at time n.

    Reinforced model: 2(B/(b+1) + G) - n. Strong model: 2G - n.
    The masses must come from a length-n run of the same model.
    """
    m = np.asarray(masses, dtype=float)
    if rule.model is UrnModel.REINFORCED_ERW:
        s = 2.0 * (m[..., BLACK] / (rule.b + 1.0) + m[..., GREEN]) - n
    else:
        s = 2.0 * m[..., GREEN] - n
    return s


def sample_positions(
    rule: ReplacementRule, times: Sequence[int], replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """
    Walk positions at the given times for independent replicas, via the urn.

    Returns:
        Array of shape (replicas, len(times)) ordered like sorted(times).
    """
    ts = _record_times(times, max(int(t) for t in times))
    recorded, masses = simulate_urn_batch(rule, int(ts[-1]), replicas, rng, record=ts)
    return np.rint(position_from_urn(rule, masses, recorded[None, :]))


def exact_position_law(rule: ReplacementRule, n: int) -> Dict[int, float]:
    """
    Exact law of the encoded position at time n by enumerating the urn chain.

    Returns:
        Mapping position -> probability.
    """
    if not 1 <= n <= 10:
        raise ParameterError(f"exact enumeration supports 1 <= n <= 10, got {n}")
    b = Fraction(rule.b).limit_denominator(10**9)
    probs = [[Fraction(float(x)).limit_denominator(10**9) for x in row] for row in rule.probs]
    outcomes = [
        [tuple(Fraction(float(x)).limit_denominator(10**9) for x in o) for o in row]
        for row in rule.outcomes
    ]
    half = Fraction(1, 2)
    zero = Fraction(0)
    states: Dict[Tuple[Fraction, Fraction, Fraction], Fraction] = {
        (zero, Fraction(1), zero): half,
        (zero, zero, Fraction(1)): half,
    }
    for _ in range(n - 1):
        nxt: Dict[Tuple[Fraction, Fraction, Fraction], Fraction] = {}
        for masses, prob in states.items():
            total = sum(masses)
            for color in range(3):
                if masses[color] == 0:
                    continue
                pc = prob * masses[color] / total
                for pk, added in zip(probs[color], outcomes[color]):
                    if pk == 0:
                        continue
                    key = tuple(a + d for a, d in zip(masses, added))
                    nxt[key] = nxt.get(key, zero) + pc * pk
        states = nxt
    law: Dict[int, Fraction] = {}
    for (bl, gr, _), prob in states.items():
        if rule.model is UrnModel.REINFORCED_ERW:
            s = 2 * (bl / (b + 1) + gr) - n
        else:
            s = 2 * gr - n
        key = int(round(float(s)))
        law[key] = law.get(key, zero) + prob
    return {s: float(q) for s, q in sorted(law.items())}


def sample_eta(
    n: int, i: int, b: float, rng: np.random.Generator, size: Optional[int] = None
) -> Union[int, np.ndarray]:
    """
    Draw eta(n, i) from the two-color mass urn.

    The urn starts at (1, (i-1)(b+1)); each draw adds b+1 to the drawn color.
    After n-i draws, eta = (G + b)/(b+1).

    Raises:
        ParameterError: If i < 1 or i > n.
        SimulationError: If (G+b)/(b+1) is not within 1e-6 of an integer.
    """
    if i < 1 or i > n:
        raise ParameterError(f"sample_eta needs 1 <= i <= n, got n={n}, i={i}")
    if b < 0:
        raise ParameterError(f"b must be >= 0, got {b}")
    count = 1 if size is None else size
    green = np.ones(count)
    red = np.full(count, (i - 1) * (b + 1.0))
    for _ in range(n - i):
        hit = rng.random(count) * (green + red) < green
        green += np.where(hit, b + 1.0, 0.0)
        red += np.where(hit, 0.0, b + 1.0)
    raw = (green + b) / (b + 1.0)
    eta = np.rint(raw)
    if np.any(np.abs(raw - eta) > 1e-6):
        raise SimulationError("eta urn produced a non-integer label")
    eta = eta.astype(int)
    if size is None:
        return int(eta[0])
    return eta
