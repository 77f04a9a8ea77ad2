"""
Isotropic stable sampler checks.
"""
import logging
import math
from typing import List

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats as sps

from ..utils.stable import StableParams, empirical_cf, sample_isotropic_stable, sample_positive_stable, stable_cf
from ..utils.stats import MCReport, ks_test, ks_two_sample, report_estimate, report_ks
from .base_check import BaseCheck, CheckConfig, register_check

logger = logging.getLogger(__name__)


@register_check
class StableSampler(BaseCheck):
    config = CheckConfig(
        name="stable-sampler",
        description="Empirical CF against exp(-||theta||^alpha), planar rotation invariance, the Gaussian "
        "branch, Cauchy quartiles and the Levy special case",
        criterion="13",
    )

    class Settings(BaseModel):
        alphas: List[float] = Field([0.8, 1.0, 1.5, 2.0], description="Stability indices")
        thetas: List[float] = Field([0.25, 0.5, 1.0, 2.0, 3.0], description="Frequencies theta")
        samples: int = Field(100_000, ge=100, description="Samples per index")
        k: float = Field(4.0, gt=0.0, description="Band in units of 1/sqrt(N)")
        rotation_radius: float = Field(1.0, gt=0.0, description="|theta| of the planar rotation check")
        rotation_angle: float = Field(1.0, description="Rotation angle in radians")
        rotation_k: float = Field(6.0, gt=0.0, description="Rotation band in units of 1/sqrt(N)")

    def run(self, seed: int, threads: int = 1) -> List[MCReport]:
        s = self.settings
        reports = []
        for i, alpha in enumerate(s.alphas):
            x = sample_isotropic_stable(StableParams(alpha=alpha, dim=1), self.stream(seed, i), size=s.samples)
            for theta in s.thetas:
                cf = empirical_cf(x, theta)
                reports.append(
                    report_estimate(
                        f"cf-alpha{alpha:g}-theta{theta:g}", cf.value.real, cf.se,
                        stable_cf(theta, alpha), s.samples, seed, k=s.k,
                    )
                )
                reports.append(
                    report_estimate(
                        f"cf-imag-alpha{alpha:g}-theta{theta:g}", cf.value.imag, cf.se, 0.0,
                        s.samples, seed, k=s.k, note="symmetry",
                    )
                )
            if alpha == 1.0:
                density = 1.0 / (math.pi * 2.0)
                se = math.sqrt(0.25 * 0.75 / s.samples) / density
                for q, target in ((0.25, -1.0), (0.75, 1.0)):
                    reports.append(
                        report_estimate(
                            f"cauchy-quartile-{q:g}", float(np.quantile(x[:, 0], q)), se, target,
                            s.samples, seed, k=s.k,
                        )
                    )
            reports.append(self._rotation_report(alpha, seed, i))

        offset = 2 * len(s.alphas)
        levy = sample_positive_stable(0.5, self.stream(seed, offset), size=s.samples)
        near = StableParams(alpha=2.0 - 1e-9, dim=1)
        gauss = StableParams(alpha=2.0, dim=1)
        reports.append(
            report_ks(
                "near-gaussian-vs-gaussian",
                ks_two_sample(
                    sample_isotropic_stable(near, self.stream(seed, offset + 1), size=s.samples)[:, 0],
                    sample_isotropic_stable(gauss, self.stream(seed, offset + 2), size=s.samples)[:, 0],
                ),
                2 * s.samples,
                seed,
                note="alpha = 2 - 1e-9 against the Gaussian branch",
            )
        )
        reports.append(
            report_ks(
                "positive-stable-half-vs-levy",
                ks_test(levy, sps.levy(scale=0.5).cdf),
                s.samples,
                seed,
            )
        )
        return reports

    def _rotation_report(self, alpha: float, seed: int, index: int) -> MCReport:
        """CF at theta and at theta rotated by the configured angle, for planar samples."""
        s = self.settings
        x = sample_isotropic_stable(
            StableParams(alpha=alpha, dim=2), self.stream(seed, len(s.alphas) + index), size=s.samples
        )
        theta = np.array([s.rotation_radius, 0.0])
        rotated = s.rotation_radius * np.array([math.cos(s.rotation_angle), math.sin(s.rotation_angle)])
        gap = empirical_cf(x, rotated).value - empirical_cf(x, theta).value
        return report_estimate(
            f"rotation-invariance-alpha{alpha:g}", abs(gap), 1.0 / math.sqrt(s.samples), 0.0,
            s.samples, seed, k=s.rotation_k, note=f"d=2, angle={s.rotation_angle:g}",
        )
