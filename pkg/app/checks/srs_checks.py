"""
Shark random swim checks: limit characteristic functions in the subcritical
regime, Gaussian scaling at criticality, supercritical exponents and the
joint cluster weights behind Z.
"""
import logging
import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..utils.srs import (
    LimitCFSettings,
    SRSConfig,
    SRSMethod,
    critical_gaussian_scale,
    empirical_weight_tail,
    estimate_z1_alpha_moment,
    limit_exponent,
    sample_cluster_power_sums,
    sample_paths,
    sample_supercritical_weights_batch,
    scaling_exponent,
    simulate_srs_replicas,
    stable_from_power_sums,
    subcritical_limit_cf,
    supercritical_truncation,
)
from ..utils.stable import StableParams, sample_isotropic_stable
from ..utils.stats import (
    MCReport,
    absolute,
    critical_variance_check,
    ks_two_sample,
    report_estimate,
    report_exact,
    report_ks,
    report_mean,
    report_slope,
)
from ..utils.theory import Model, beta_moment, critical_b, critical_prefactor, kappa, srs_critical_scale, z1_moments
from .base_check import BaseCheck, CheckConfig, register_check

logger = logging.getLogger(__name__)


@register_check
class SRSSubcriticalCF(BaseCheck):
    config = CheckConfig(
        name="srs-subcritical-cf",
        description="Empirical CF of S_n/n^{1/alpha} against the f-integral limit, and alpha-homogeneity",
        criterion="9",
    )

    class Settings(BaseModel):
        alpha: float = Field(1.0, gt=0.0, le=2.0, description="Stability index")
        b: float = Field(0.5, ge=0.0, description="Reinforcement b")
        p: float = Field(0.2, gt=0.0, lt=1.0, description="Memory p")
        n: int = Field(10_000, ge=10, description="Horizon n")
        replicas: int = Field(10_000, ge=2, description="Swim replicas")
        thetas: List[float] = Field([0.1, 0.25, 0.5, 1.0, 2.0], description="Frequencies theta")
        scale: float = Field(2.0, gt=0.0, description="Factor c of the homogeneity check")
        limit: LimitCFSettings = Field(default_factory=LimitCFSettings)

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        rng = self.stream(seed, 0)
        sums = sample_cluster_power_sums(s.alpha, s.b, s.p, [s.n], s.replicas, rng)[:, 0]
        positions = stable_from_power_sums(sums, StableParams(alpha=s.alpha, dim=1), rng)[:, 0]
        scaled = positions / s.n ** (1.0 / s.alpha)

        thetas = np.asarray(s.thetas, dtype=float)
        limit = subcritical_limit_cf(
            thetas[:, None, None], [1.0], s.alpha, s.b, s.p, self.stream(seed, 1), s.limit
        )
        scaled_limit = subcritical_limit_cf(
            s.scale * thetas[:, None, None], [1.0], s.alpha, s.b, s.p, self.stream(seed, 2), s.limit
        )
        reports = []
        for j, theta in enumerate(thetas):
            phase = np.cos(theta * scaled)
            se = math.hypot(phase.std(ddof=1) / math.sqrt(s.replicas), limit.se[j])
            reports.append(
                report_estimate(
                    f"cf-theta{theta:g}",
                    float(phase.mean()),
                    se,
                    float(limit.values[j].real),
                    replicas=s.replicas,
                    seed=seed,
                    note=f"n={s.n}, x_min={limit.x_min:.1e}",
                )
            )
        factor = s.scale**s.alpha
        base, base_se = limit_exponent(limit)
        scaled_exp, scaled_se = limit_exponent(scaled_limit)
        for j, theta in enumerate(thetas):
            reports.append(
                report_estimate(
                    f"limit-cf-homogeneity-theta{theta:g}",
                    float(scaled_exp[j]),
                    math.hypot(scaled_se[j], factor * base_se[j]),
                    float(factor * base[j]),
                    replicas=s.limit.paths,
                    seed=seed,
                    note=f"independent f-paths, c={s.scale:g}",
                )
            )
        return reports


@register_check
class SRSRepresentation(BaseCheck):
    config = CheckConfig(
        name="srs-direct-vs-clusters",
        description="Two-sample KS between the walk engine and the cluster representation of S_n",
        criterion="srs",
    )

    class Settings(BaseModel):
        alphas: List[float] = Field([1.5, 2.0], description="Stability indices")
        horizons: List[int] = Field([500], description="Horizons n")
        b: float = Field(1.0, ge=0.0, description="Reinforcement b")
        p: float = Field(0.5, gt=0.0, lt=1.0, description="Memory p")
        cluster_replicas: int = Field(10_000, ge=2, description="Cluster-representation replicas")
        walk_replicas: int = Field(10_000, ge=2, description="Direct walk replicas")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        for i, alpha in enumerate(s.alphas):
            config = SRSConfig(
                alpha=alpha, b=s.b, p=s.p, n=max(s.horizons),
                replicas=s.walk_replicas, seed=self.substream_seed(seed, i),
            )
            clusters = sample_paths(config, s.horizons, s.cluster_replicas, self.stream(seed, i))
            for j, n in enumerate(sorted(s.horizons)):
                direct = simulate_srs_replicas(
                    config.model_copy(update={"n": n, "seed": self.substream_seed(seed, 100 * i + j)}),
                    SRSMethod.DIRECT,
                    threads,
                )
                reports.append(
                    report_ks(
                        f"alpha{alpha:g}-n{n}-direct-vs-clusters",
                        ks_two_sample(direct[:, 0], clusters[:, j, 0]),
                        s.walk_replicas + s.cluster_replicas,
                        seed,
                    )
                )
        return reports


@register_check
class SRSCriticalScaling(BaseCheck):
    config = CheckConfig(
        name="srs-critical-scaling",
        description="Var(S_n) against n ln n for the critical Gaussian swim, and the closed-form scale",
        criterion="10",
    )

    class Settings(BaseModel):
        p: float = Field(0.25, gt=0.0, le=0.5, description="Memory p (b = 1-2p)")
        n_grid: List[int] = Field([1_000, 3_000, 10_000, 30_000, 100_000], description="Horizons")
        replicas: int = Field(2_000, ge=2, description="Replicas")
        tolerance: float = Field(0.15, gt=0.0, description="Relative tolerance")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        b = critical_b(Model.SRS, s.p)
        scale = srs_critical_scale(s.p)
        return [
            critical_variance_check(
                Model.SRS, s.p, s.n_grid, s.replicas, self.stream(seed, 0),
                seed=seed, tolerance=s.tolerance,
            ),
            report_exact("gaussian-scale-from-Z1", critical_gaussian_scale(b, s.p), scale, seed),
            report_exact(
                "gaussian-scale-vs-erw2-prefactor",
                scale**2,
                2.0 * critical_prefactor(Model.ERW2, s.p) ** 2,
                seed,
                note="variance 2 of the Gaussian innovations",
            ),
        ]


@register_check
class SRSSupercritical(BaseCheck):
    config = CheckConfig(
        name="srs-supercritical",
        description="Exponent kappa of |S_n| when alpha*kappa > 1, and the joint cluster weights of Z",
        criterion="11",
    )

    class Settings(BaseModel):
        cases: List[Tuple[float, float, float, str]] = Field(
            [(1.8, 1.0, 0.5, "median"), (2.0, 1.0, 0.5, "mean")],
            description="(alpha, b, p, statistic)",
        )
        n_grid: List[int] = Field([1_000, 2_500, 6_000, 15_000, 40_000], description="Horizons")
        replicas: int = Field(2_000, ge=2, description="Replicas for the exponents")
        tolerance: float = Field(0.05, gt=0.0, description="Absolute slope tolerance")
        z_alpha: float = Field(2.0, gt=0.0, le=2.0, description="Index for the Z weights")
        z_b: float = Field(1.0, ge=0.0, description="Reinforcement b for the Z weights")
        z_p: float = Field(0.5, gt=0.0, lt=1.0, description="Memory p for the Z weights")
        z_n: int = Field(2_000, ge=2, description="Tree size for the Z weights")
        z_replicas: int = Field(10_000, ge=2, description="Replicas for the Z weights")
        tail_tol: float = Field(0.05, gt=0.0, description="Tolerance on the truncated weight tail")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        for i, (alpha, b, p, statistic) in enumerate(s.cases):
            config = SRSConfig(alpha=alpha, b=b, p=p, n=max(s.n_grid))
            fit = scaling_exponent(config, s.n_grid, s.replicas, self.stream(seed, i), statistic)
            reports.append(
                report_slope(
                    f"alpha{alpha:g}-b{b:g}-p{p:g}-{statistic}-exponent",
                    fit, config.kappa, s.replicas, seed, tol=s.tolerance,
                )
            )

        alpha, b, p = s.z_alpha, s.z_b, s.z_p
        rng = self.stream(seed, len(s.cases))
        weights = sample_supercritical_weights_batch(alpha, b, p, s.z_n, s.z_replicas, rng)
        k = kappa(Model.SRS, b, p)
        z1 = z1_moments(b, p)
        reports.append(
            report_mean(
                "Z2-weight-mean", weights[:, 1], (1.0 - p) * beta_moment(2, b, k) * z1["z1_mean"], seed,
                note=f"n={s.z_n}",
            )
        )

        if alpha == 2.0:
            z1_alpha = z1["z1_second_moment"]
        elif alpha == 1.0:
            z1_alpha = z1["z1_mean"]
        else:
            z1_alpha, _ = estimate_z1_alpha_moment(alpha, b, p, s.z_n, s.z_replicas, rng)
        cutoff = supercritical_truncation(alpha, b, p, z1_alpha, s.tail_tol / 2.0)
        tails = [empirical_weight_tail(weights, alpha, I) for I in (cutoff, 2 * cutoff, 4 * cutoff)]
        reports.append(
            MCReport(
                name="Z-weight-tail", estimate=tails[0], se=0.0, target=0.0,
                rule=absolute(s.tail_tol), replicas=s.z_replicas, seed=seed,
                note=f"I={cutoff} from the Beta tail at tol/2",
            )
        )
        reports.append(
            report_exact("Z-weight-tail-decreasing", float(tails[0] >= tails[1] >= tails[2]), 1.0, seed)
        )

        if alpha == 2.0:
            gauss = StableParams(alpha=2.0, dim=1)
            z = np.array(
                [row @ sample_isotropic_stable(gauss, rng, size=row.size)[:, 0] for row in weights]
            )
            reports.append(
                report_mean(
                    "Z-conditional-variance", z**2 - 2.0 * (weights**2).sum(axis=1), 0.0, seed,
                    note="E[Z^2 | weights] = 2 sum Z_i^2",
                )
            )
        return reports
