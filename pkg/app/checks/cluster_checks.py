"""
Percolation cluster checks: root-cluster limits, the eta/Beta limit, moment
growth of the coupled cluster bounds and discrete/continuous tree agreement.
"""
import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..utils.patree import grow_continuous, grow_discrete, percolate, sample_root_cluster, sample_Xbar_Xunder
from ..utils.stats import (
    MCReport,
    ks_two_sample,
    loglog_slope,
    mc_moments,
    ratio_of_means,
    relative,
    report_ks,
    report_mean,
    report_slope,
)
from ..utils.theory import Model, beta_moment, cluster_count_mean, half_edge_ratio, kappa, z1_moments
from ..utils.urn import sample_eta
from .base_check import BaseCheck, CheckConfig, register_check

logger = logging.getLogger(__name__)


@register_check
class RootClusterMoments(BaseCheck):
    config = CheckConfig(
        name="root-cluster-moments",
        description="Mean and second moment of |c_{1,n}|/n^kappa against the Gamma-function limits, "
        "and the half-edge to weight ratio",
        criterion="6",
    )

    class Settings(BaseModel):
        params: List[Tuple[float, float]] = Field([(0.0, 0.5), (1.0, 0.5)], description="(b, p) pairs")
        n: int = Field(10_000, ge=2, description="Tree size")
        replicas: int = Field(10_000, ge=2, description="Replicas")
        ratio_tolerance: float = Field(0.05, gt=0.0, description="Relative tolerance of H/Y")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        for i, (b, p) in enumerate(s.params):
            sample = sample_root_cluster(s.n, b, p, self.stream(seed, i), size=s.replicas)
            scaled = sample.size / s.n ** kappa(Model.SRS, b, p)
            target = z1_moments(b, p)
            tag = f"b{b:g}-p{p:g}"
            reports.append(report_mean(f"Z1-mean-{tag}", scaled, target["z1_mean"], seed))
            reports.append(
                report_mean(f"Z1-second-moment-{tag}", scaled**2, target["z1_second_moment"], seed)
            )
            ratio, ratio_se = ratio_of_means(sample.half_edges, sample.y)
            reports.append(
                MCReport(
                    name=f"H1-over-Y1-{tag}",
                    estimate=ratio,
                    se=ratio_se,
                    target=half_edge_ratio(b, p),
                    rule=relative(s.ratio_tolerance),
                    replicas=s.replicas,
                    seed=seed,
                    note="ratio of means at tau_n, delta-method SE",
                )
            )
        return reports


@register_check
class EtaBetaLimit(BaseCheck):
    config = CheckConfig(
        name="eta-beta-limit",
        description="Moments of eta(n, i)/n against Beta(1/(b+1), i-1)",
        criterion="7",
    )

    class Settings(BaseModel):
        labels: List[int] = Field([2, 5], description="Cluster labels i")
        bs: List[float] = Field([0.0, 1.0], description="Reinforcement values b")
        n: int = Field(10_000, ge=2, description="Horizon n")
        replicas: int = Field(10_000, ge=2, description="Replicas")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        index = 0
        for b in s.bs:
            for i in s.labels:
                frac = sample_eta(s.n, i, b, self.stream(seed, index), size=s.replicas) / s.n
                index += 1
                for q in (1, 2):
                    reports.append(
                        report_mean(
                            f"eta-moment{q}-b{b:g}-i{i}", frac**q, beta_moment(i, b, float(q)), seed
                        )
                    )
        return reports


@register_check
class MomentBoundSlope(BaseCheck):
    config = CheckConfig(
        name="moment-bound-slope",
        description="log E[Xbar_i(n)^4] grows like 4 kappa log(n/i)",
        criterion="8",
    )

    class Settings(BaseModel):
        b: float = Field(1.0, ge=0.0, description="Reinforcement b")
        p: float = Field(0.5, gt=0.0, lt=1.0, description="Memory p")
        i: int = Field(2, ge=2, description="Cluster label i")
        order: int = Field(4, ge=1, description="Moment order")
        eps: float = Field(0.0, ge=0.0, description="Slack in the birth-time bounds")
        n_grid: List[int] = Field([400, 1_600, 6_400, 25_600, 102_400], description="Horizons")
        replicas: int = Field(10_000, ge=2, description="Replicas per horizon")
        tolerance: float = Field(0.1, gt=0.0, description="Absolute slope tolerance")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        moments = []
        for j, n in enumerate(s.n_grid):
            _, hi = sample_Xbar_Xunder(s.i, n, s.eps, s.b, s.p, self.stream(seed, j), size=s.replicas)
            moments.append(mc_moments(hi.astype(float) ** s.order).mean)
        fit = loglog_slope(np.asarray(s.n_grid, dtype=float) / s.i, moments)
        target = s.order * kappa(Model.SRS, s.b, s.p)
        return [
            report_slope(
                f"Xbar-moment{s.order}-slope-i{s.i}", fit, target, s.replicas, seed, tol=s.tolerance
            )
        ]


@register_check
class TreeDiscreteContinuous(BaseCheck):
    config = CheckConfig(
        name="tree-discrete-continuous",
        description="Discrete and continuous-time trees give the same percolated root cluster and "
        "cluster count, matching the reduced root-cluster chain",
        criterion="patree",
    )

    class Settings(BaseModel):
        b: float = Field(1.0, ge=0.0, description="Reinforcement b")
        p: float = Field(0.5, gt=0.0, lt=1.0, description="Memory p")
        n: int = Field(500, ge=2, description="Tree size")
        replicas: int = Field(10_000, ge=2, description="Trees per construction")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        roots = {}
        counts = []
        for j, grow in enumerate((grow_discrete, grow_continuous)):
            rng = self.stream(seed, j)
            sizes = np.empty(s.replicas)
            for r in range(s.replicas):
                forest = percolate(grow(s.n, s.b, rng), s.p, rng)
                sizes[r] = forest.sizes[0]
                counts.append(forest.n_clusters)
            roots[grow.__name__] = sizes
        chain = sample_root_cluster(s.n, s.b, s.p, self.stream(seed, 2), size=s.replicas).size
        return [
            report_ks(
                "root-size-discrete-vs-continuous",
                ks_two_sample(roots["grow_discrete"], roots["grow_continuous"]),
                2 * s.replicas,
                seed,
            ),
            report_ks(
                "root-size-tree-vs-reduced-chain",
                ks_two_sample(roots["grow_discrete"], chain),
                2 * s.replicas,
                seed,
            ),
            report_mean("cluster-count-mean", counts, cluster_count_mean(s.n, s.p), seed),
        ]
