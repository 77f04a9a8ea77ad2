"""
Elephant random walk checks: urn/walk equivalence, subcritical covariance,
critical n ln n scaling and supercritical exponents.
"""
import itertools
import logging
from functools import partial
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..utils.replicas import run_replicas
from ..utils.stats import (
    MCReport,
    critical_variance_check,
    ks_two_sample,
    loglog_slope,
    mc_cov,
    report_estimate,
    report_exact,
    report_ks,
    report_slope,
)
from ..utils.theory import Model, cov_erw1, cov_erw2, cov_matrix, kappa
from ..utils.urn import UrnModel, exact_position_law, replacement_rule, sample_positions
from ..utils import walk
from .base_check import BaseCheck, CheckConfig, register_check

logger = logging.getLogger(__name__)

URN_OF = {Model.ERW1: UrnModel.REINFORCED_ERW, Model.ERW2: UrnModel.STRONG_ERW}
RULE_OF = {Model.ERW1: walk.UpdateRule.ON_MEMORY_ONLY, Model.ERW2: walk.UpdateRule.ALWAYS}


def _walk_final(config: walk.WalkConfig, n: int, rng: np.random.Generator) -> float:
    return float(walk.final_position(config, n, rng)[0])


@register_check
class UrnWalkEquivalence(BaseCheck):
    """Urn-encoded positions against the direct walk engine."""

    config = CheckConfig(
        name="urn-walk-equivalence",
        description="Two-sample KS between urn-derived and direct-walk S_n for both ERW models, "
        "plus exact agreement of the enumerated laws at small n",
        criterion="1",
    )

    class Settings(BaseModel):
        params: List[Tuple[float, float]] = Field(
            [(1.0, 0.2), (1.0, 0.5), (0.0, 0.5)], description="(b, p) pairs"
        )
        horizons: List[int] = Field([500, 2000], description="Horizons n")
        urn_replicas: int = Field(10_000, ge=2, description="Urn replicas")
        walk_replicas: int = Field(10_000, ge=2, description="Direct walk replicas")
        exact_n: int = Field(6, ge=1, le=6, description="Horizon of the exact enumeration")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports: List[MCReport] = []
        index = 0
        for model in (Model.ERW1, Model.ERW2):
            for b, p in s.params:
                rule = replacement_rule(URN_OF[model], b, p)
                cfg = walk.WalkConfig(p=p, b=b, rule=RULE_OF[model])
                for n in s.horizons:
                    urn_s = sample_positions(rule, [n], s.urn_replicas, self.stream(seed, index))[:, 0]
                    fn = partial(_walk_final, cfg, n)
                    walk_s = np.asarray(
                        run_replicas(fn, s.walk_replicas, self.substream_seed(seed, index), threads)
                    )
                    reports.append(
                        report_ks(
                            f"{model.value}-b{b:g}-p{p:g}-n{n}-urn-vs-walk",
                            ks_two_sample(urn_s, walk_s),
                            replicas=s.urn_replicas + s.walk_replicas,
                            seed=seed,
                        )
                    )
                    index += 1
                exact_urn = exact_position_law(rule, s.exact_n)
                exact_walk = walk.exact_position_law(cfg, s.exact_n)
                keys = set(exact_urn) | set(exact_walk)
                gap = max(abs(exact_urn.get(k, 0.0) - exact_walk.get(k, 0.0)) for k in keys)
                reports.append(
                    report_exact(
                        f"{model.value}-b{b:g}-p{p:g}-exact-law-n{s.exact_n}", gap, 0.0, seed, tol=1e-9
                    )
                )
        return reports


class _SubcriticalCov(BaseCheck):
    """Shared body of the subcritical covariance checks."""

    model: Model

    class Settings(BaseModel):
        b: float = Field(1.0, ge=0.0, description="Reinforcement b")
        p: float = Field(0.2, gt=0.0, lt=1.0, description="Memory p")
        n: int = Field(10_000, ge=10, description="Horizon n")
        times: List[float] = Field([0.5, 1.0], description="Scaled times s, t")
        replicas: int = Field(10_000, ge=2, description="Replicas")
        k: float = Field(4.0, gt=0.0, description="Acceptance band in standard errors")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        rule = replacement_rule(URN_OF[self.model], s.b, s.p)
        steps = [int(np.floor(t * s.n)) for t in s.times]
        positions = sample_positions(rule, steps, s.replicas, self.stream(seed, 0)) / np.sqrt(s.n)
        est = mc_cov(positions)
        target = cov_matrix(self.model, s.times, s.b, s.p)
        reports = []
        for a, c in itertools.combinations_with_replacement(range(len(s.times)), 2):
            reports.append(
                report_estimate(
                    f"{self.model.value}-cov({s.times[a]:g},{s.times[c]:g})",
                    float(est.cov[a, c]),
                    float(est.se[a, c]),
                    float(target[a, c]),
                    replicas=s.replicas,
                    seed=seed,
                    k=s.k,
                    note=f"b={s.b:g} p={s.p:g} n={s.n}",
                )
            )
        return reports


@register_check
class ERW1SubcriticalCov(_SubcriticalCov):
    model = Model.ERW1
    config = CheckConfig(
        name="erw1-subcritical-cov",
        description="Covariance of S_[sn]/sqrt(n) for the reinforced ERW against the diffusive kernel",
        criterion="2",
    )


@register_check
class ERW2SubcriticalCov(_SubcriticalCov):
    model = Model.ERW2
    config = CheckConfig(
        name="erw2-subcritical-cov",
        description="Covariance of S_[sn]/sqrt(n) for the strongly reinforced ERW against the diffusive kernel",
        criterion="2",
    )

    class Settings(_SubcriticalCov.Settings):
        b: float = Field(0.4, ge=0.0, description="Reinforcement b")


@register_check
class CovB0Agreement(BaseCheck):
    config = CheckConfig(
        name="cov-b0-agreement",
        description="Both covariance kernels coincide at b = 0",
        criterion="2",
    )

    class Settings(BaseModel):
        ps: List[float] = Field([0.05, 0.2, 0.35, 0.49], description="Memory parameters")
        times: List[float] = Field([0.1, 0.5, 1.0, 3.0], description="Time grid")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        gap = 0.0
        for p in s.ps:
            for a, c in itertools.combinations_with_replacement(sorted(s.times), 2):
                one, two = cov_erw1(a, c, 0.0, p), cov_erw2(a, c, 0.0, p)
                gap = max(gap, abs(one - two) / max(1.0, abs(one)))
        return [report_exact("cov-b0-max-relative-gap", gap, 0.0, seed, tol=1e-12)]


@register_check
class ERWCriticalScaling(BaseCheck):
    config = CheckConfig(
        name="erw-critical-scaling",
        description="Slope of Var(S_n) against n ln n at criticality for both ERW models",
        criterion="3",
    )

    class Settings(BaseModel):
        p: float = Field(0.25, gt=0.0, le=0.5, description="Memory p (b is set to the critical value)")
        n_grid: List[int] = Field([1_000, 3_000, 10_000, 30_000, 100_000], description="Horizons")
        replicas: int = Field(4_000, ge=2, description="Replicas")
        tolerance: float = Field(0.15, gt=0.0, description="Relative tolerance")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        return [
            critical_variance_check(
                model, s.p, s.n_grid, s.replicas, self.stream(seed, i), seed=seed, tolerance=s.tolerance
            )
            for i, model in enumerate((Model.ERW1, Model.ERW2))
        ]


@register_check
class ERWSupercriticalExponent(BaseCheck):
    config = CheckConfig(
        name="erw-supercritical-exponent",
        description="Log-log slope of E|S_n| against n equals kappa in the superdiffusive regime",
        criterion="4",
    )

    class Settings(BaseModel):
        cases: List[Tuple[str, float, float]] = Field(
            [("erw2", 1.0, 0.5), ("erw1", 0.0, 0.75)], description="(model, b, p)"
        )
        n_grid: List[int] = Field([1_000, 3_000, 10_000, 30_000, 100_000], description="Horizons")
        replicas: int = Field(2_000, ge=2, description="Replicas")
        tolerance: float = Field(0.05, gt=0.0, description="Absolute slope tolerance")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        for i, (name, b, p) in enumerate(s.cases):
            model = Model(name)
            rule = replacement_rule(URN_OF[model], b, p)
            positions = sample_positions(rule, s.n_grid, s.replicas, self.stream(seed, i))
            fit = loglog_slope(sorted(s.n_grid), np.abs(positions).mean(axis=0))
            reports.append(
                report_slope(
                    f"{model.value}-b{b:g}-p{p:g}-exponent",
                    fit,
                    kappa(model, b, p),
                    replicas=s.replicas,
                    seed=seed,
                    tol=s.tolerance,
                )
            )
        return reports
