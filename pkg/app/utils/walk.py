"""
Memory-reinforced random walk engine.

At time n >= 2 the walk flips a memory coin eps_n ~ Bernoulli(p), selects a
previous time I_n with probability proportional to its weight, and either
repeats the increment of I_n (memory time) or draws a fresh increment from
the step source (fresh time). The weight of I_n grows by b, either only on
memory times (`UpdateRule.ON_MEMORY_ONLY`, reinforced model) or always
(`UpdateRule.ALWAYS`, strongly reinforced model). Every new time enters with
weight 1.

RNG draw order per step: eps_n, then I_n, then (fresh times only) xi_n.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Annotated, Dict, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ParameterError, UsageError
from .fenwick import FenwickTree
from .stable import StableParams, sample_isotropic_stable

logger = logging.getLogger(__name__)


class UpdateRule(str, Enum):
    """When the weight of the selected time is reinforced."""

    ON_MEMORY_ONLY = "on_memory_only"
    ALWAYS = "always"


class RademacherSteps(BaseModel):
    """Symmetric +-1 steps in dimension one."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["rademacher"] = "rademacher"

    @property
    def dim(self) -> int:
        return 1

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return np.array([1.0 if rng.random() < 0.5 else -1.0])


class StableSteps(StableParams):
    """Isotropic alpha-stable steps."""

    kind: Literal["stable"] = "stable"

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return sample_isotropic_stable(self, rng)


StepSource = Annotated[
    Union[RademacherSteps, StableSteps], Field(discriminator="kind")
]


class WalkConfig(BaseModel):
    """Parameters of a memory-reinforced walk."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(..., gt=0.0, lt=1.0, description="Memory probability")
    b: float = Field(0.0, ge=0.0, description="Reinforcement increment")
    rule: UpdateRule = UpdateRule.ALWAYS
    step_source: StepSource = Field(default_factory=RademacherSteps)


class WalkState:
    """
    Live state of one walk: weights in a prefix-sum tree, increments and
    partial sums.

    Times are 1-based; `positions[0]` is S_0 = 0.
    """

    def __init__(self, dim: int, capacity: int = 16):
        self.dim = dim
        self.weights = FenwickTree(capacity=max(capacity, 1))
        self._increments = np.zeros((max(capacity, 1), dim))
        self._positions = np.zeros((max(capacity, 1) + 1, dim))
        self.n = 0

    @classmethod
    def start(
        cls, config: WalkConfig, rng: np.random.Generator, capacity: int = 16
    ) -> "WalkState":
        """Initialise with zeta_1 = xi_1 drawn from the step source."""
        state = cls(config.step_source.dim, capacity)
        state.append(config.step_source.draw(rng))
        return state

    def append(self, zeta: np.ndarray) -> None:
        """Record zeta as the increment of time n + 1 with weight 1."""
        if self.n == self._increments.shape[0]:
            cap = 2 * self.n
            increments = np.zeros((cap, self.dim))
            positions = np.zeros((cap + 1, self.dim))
            increments[: self.n] = self._increments
            positions[: self.n + 1] = self._positions
            self._increments, self._positions = increments, positions
        self._increments[self.n] = zeta
        self._positions[self.n + 1] = self._positions[self.n] + zeta
        self.n += 1
        self.weights.append(1.0)

    def increment(self, i: int) -> np.ndarray:
        """Increment zeta_i (1-based)."""
        return self._increments[i - 1]

    @property
    def increments(self) -> np.ndarray:
        return self._increments[: self.n].copy()

    @property
    def positions(self) -> np.ndarray:
        return self._positions[: self.n + 1].copy()

    @property
    def position(self) -> np.ndarray:
        return self._positions[self.n].copy()


@dataclass
class Trajectory:
    """Result of `run`: S_0..S_n, zeta_1..zeta_n and the final weights."""

    positions: np.ndarray
    increments: np.ndarray
    weights: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.positions[-1]


def select_memory_index(state: WalkState, rng: np.random.Generator) -> int:
    """
    Select a previous time with probability proportional to its weight.

    The state holds times 1..n-1 when the increment of time n is generated.

    Raises:
        UsageError: If there is no previous time to choose from.
    """
    if state.n < 1:
        raise UsageError("select_memory_index needs n >= 2 (no previous time)")
    return state.weights.sample(rng)


def step(
    state: WalkState,
    config: WalkConfig,
    rng: np.random.Generator,
    memory: Optional[bool] = None,
) -> np.ndarray:
    """
    Generate the next increment and update the weights.

    Args:
        state: Walk state holding times 1..n-1.
        config: Walk parameters.
        rng: Random generator.
        memory: Force eps_n instead of drawing it.

    Returns:
        The new increment zeta_n.
    """
    eps = (rng.random() < config.p) if memory is None else bool(memory)
    i = select_memory_index(state, rng)
    if eps:
        zeta = state.increment(i).copy()
    else:
        zeta = config.step_source.draw(rng)
    if eps or config.rule is UpdateRule.ALWAYS:
        state.weights.increment(i, config.b)
    state.append(zeta)
    return zeta


def run(config: WalkConfig, n: int, rng: np.random.Generator) -> Trajectory:
    """
    Simulate the walk up to time n.

    Args:
        config: Walk parameters.
        n: Horizon; n == 0 returns S_0 only.
        rng: Random generator.

    Returns:
        Trajectory with positions of shape (n + 1, d).
    """
    if n < 0:
        raise ParameterError(f"n must be non-negative, got {n}")
    if n == 0:
        d = config.step_source.dim
        return Trajectory(
            positions=np.zeros((1, d)), increments=np.zeros((0, d)), weights=np.zeros(0)
        )
    state = WalkState.start(config, rng, capacity=n)
    for _ in range(n - 1):
        step(state, config, rng)
    return Trajectory(
        positions=state.positions,
        increments=state.increments,
        weights=np.asarray(state.weights.values()),
    )


def final_position(config: WalkConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """S_n of one fresh run."""
    return run(config, n, rng).final


def exact_position_law(config: WalkConfig, n: int) -> Dict[int, float]:
    """
    Exact law of S_n for Rademacher steps by enumerating every outcome.

    Each branch of (eps_k, I_k, xi_k) is followed with its exact rational
    probability, so the result is limited to small n.

    Returns:
        Mapping position -> probability.
    """
    if not isinstance(config.step_source, RademacherSteps):
        raise UsageError("exact_position_law supports Rademacher steps only")
    if not 1 <= n <= 6:
        raise ParameterError(f"exact enumeration supports 1 <= n <= 6, got {n}")
    p = Fraction(config.p).limit_denominator(10**9)
    b = Fraction(config.b).limit_denominator(10**9)
    half = Fraction(1, 2)
    always = config.rule is UpdateRule.ALWAYS

    # state: (weights, increments) -> probability
    states: Dict[Tuple[Tuple[Fraction, ...], Tuple[int, ...]], Fraction] = {
        ((Fraction(1),), (1,)): half,
        ((Fraction(1),), (-1,)): half,
    }
    for _ in range(n - 1):
        nxt: Dict[Tuple[Tuple[Fraction, ...], Tuple[int, ...]], Fraction] = {}
        for (weights, incs), prob in states.items():
            total = sum(weights)
            for i, w in enumerate(weights):
                pick = prob * w / total
                # memory time
                grown = list(weights)
                grown[i] += b
                key = (tuple(grown) + (Fraction(1),), incs + (incs[i],))
                nxt[key] = nxt.get(key, Fraction(0)) + pick * p
                # fresh time
                fresh_weights = tuple(grown) if always else weights
                for sign in (1, -1):
                    key = (fresh_weights + (Fraction(1),), incs + (sign,))
                    nxt[key] = nxt.get(key, Fraction(0)) + pick * (1 - p) * half
        states = nxt
    law: Dict[int, Fraction] = {}
    for (_, incs), prob in states.items():
        s = sum(incs)
        law[s] = law.get(s, Fraction(0)) + prob
    return {s: float(q) for s, q in sorted(law.items())}
