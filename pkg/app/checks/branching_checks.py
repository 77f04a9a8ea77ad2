"""
Branching process identities: exponential martingales of the cluster weight
and the Gamma law of the tree martingale limit W.
"""
import logging
import math
from typing import List

import numpy as np
from pydantic import BaseModel, Field

from ..utils.patree import sample_w, simulate_cluster_process
from ..utils.stats import MCReport, gamma_cdf, ks_test, report_ks, report_mean
from ..utils.theory import branching_moments, w_constants
from .base_check import BaseCheck, CheckConfig, register_check

logger = logging.getLogger(__name__)


@register_check
class BranchingMartingale(BaseCheck):
    config = CheckConfig(
        name="branching-martingale",
        description="E[e^{-(b+p)t} Y(t)] = 1 and the second moment of the cluster weight process",
        criterion="5",
    )

    class Settings(BaseModel):
        times: List[float] = Field([1.0, 2.0, 4.0], description="Read times t")
        bs: List[float] = Field([0.0, 1.0], description="Reinforcement values b")
        p: float = Field(0.5, gt=0.0, lt=1.0, description="Memory p")
        replicas: int = Field(10_000, ge=2, description="Cluster replicas")
        k_mean: float = Field(3.0, gt=0.0, description="Band for the martingale mean in SE")
        k_second: float = Field(4.0, gt=0.0, description="Band for the second moment in SE")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        times = sorted(s.times)
        for i, b in enumerate(s.bs):
            sample = simulate_cluster_process(times, b, s.p, self.stream(seed, i), s.replicas)
            for j, t in enumerate(times):
                m = math.exp(-(b + s.p) * t)
                scaled = m * sample.y[:, j]
                _, second = branching_moments(t, b, s.p)
                reports.append(
                    report_mean(f"martingale-mean-b{b:g}-t{t:g}", scaled, 1.0, seed, k=s.k_mean)
                )
                reports.append(
                    report_mean(
                        f"second-moment-b{b:g}-t{t:g}", scaled**2, m * m * second, seed, k=s.k_second
                    )
                )
        return reports


@register_check
class GammaW(BaseCheck):
    config = CheckConfig(
        name="gamma-W",
        description="KS of W = lim e^{-(b+1)t} Y(t) against Gamma(1/(b+1), rate 1/(b+1))",
        criterion="5",
    )

    class Settings(BaseModel):
        bs: List[float] = Field([0.0, 1.0], description="Reinforcement values b")
        n: int = Field(5_000, ge=2, description="Tree size used to approximate W")
        replicas: int = Field(10_000, ge=2, description="Samples of W")
        threshold: float = Field(1e-3, gt=0.0, lt=1.0, description="KS p-value threshold")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        for i, b in enumerate(s.bs):
            consts = w_constants(b, 0.5)
            w = sample_w(b, s.n, self.stream(seed, i), s.replicas)
            shape, rate = consts["w_shape"], consts["w_rate"]
            result = ks_test(w, lambda x, a=shape, r=rate: gamma_cdf(x, a, r))
            reports.append(
                report_ks(f"W-gamma-b{b:g}", result, s.replicas, seed, threshold=s.threshold)
            )
            reports.append(
                report_mean(f"W-mean-b{b:g}", w, consts["w_mean"], seed)
            )
        return reports
