"""
样本协方差谱与 Marchenko–Pastur 律的 KS 距离
"""

from typing import Optional

from ...sampler import SeedSpec, sample_design
from ...spectra import covariance_eigenvalues, mp_ks_distance
from ..experiment_config import ExperimentConfig
from ..report import AnalyticReport, ruled_report
from ..trials import TrialStatistics
from .base import BaseCheck, CheckName


class MpKsCheck(BaseCheck):
    """第 0 个试验的设计矩阵的谱与 MP 分布函数的 KS 距离小于容差"""
    check_name = CheckName.MP_KS

    def validate(self, config: ExperimentConfig) -> None:
        self.require_identity(config)
        self.require(config.d < config.n, f"需要 ζ < 1，实际 d={config.d}, N={config.n}")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        design = sample_design(config.n, config.d, config.sigma_matrix(), config.scaled, SeedSpec(config.master_seed, 0))
        distance = mp_ks_distance(covariance_eigenvalues(design, config.scaled), config.zeta)
        tolerance = config.param("mp_ks_tolerance")
        return ruled_report(
            self.name, 0.0, distance, 0.0, distance < tolerance,
            f"KS 距离 < {tolerance:g}",
            {"d": config.d, "zeta": config.zeta},
            z=0.0,
        )
