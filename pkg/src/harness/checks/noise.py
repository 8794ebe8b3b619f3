"""
噪声估计量 σ̂²_ML 的校验：均值、方差、矩母函数、特征函数与尾界
"""

import math
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from ...analytics import noise_cf, noise_log_mgf, noise_moments, noise_tail_bound
from ..experiment_config import ExperimentConfig
from ..report import AnalyticReport, ruled_report, statistical_report
from ..trials import TrialStatistics
from .base import BaseCheck, CheckName, cf_report


class NoiseMeanCheck(BaseCheck):
    """E[σ̂²_ML] = σ0²(1−ζ)"""
    check_name = CheckName.NOISE_MEAN
    groups = frozenset({"ml"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require(config.d < config.n, f"需要 d < N，实际 d={config.d}, N={config.n}")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        mean, _ = noise_moments(config.n, config.zeta, config.sigma0_sq)
        return statistical_report(
            self.name, mean, stats.mean("sigma_ml"), stats.std_error("sigma_ml"), config.z_threshold
        )


class NoiseVarCheck(BaseCheck):
    """Var[σ̂²_ML] = 2σ0⁴(1−ζ)/N"""
    check_name = CheckName.NOISE_VAR
    groups = frozenset({"ml"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require(config.d < config.n, f"需要 d < N，实际 d={config.d}, N={config.n}")
        self.require(config.trials >= 2, "样本方差至少需要 2 个试验")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        _, variance = noise_moments(config.n, config.zeta, config.sigma0_sq)
        empirical = stats.variance("sigma_ml")
        rtol = config.param("noise_var_rtol")
        std_error = empirical * math.sqrt(2.0 / (stats.count - 1))
        return ruled_report(
            self.name, variance, empirical, std_error,
            abs(empirical - variance) <= rtol * variance,
            f"|经验方差 − 解析方差| <= {rtol:g}·解析方差",
        )


class NoiseMgfCheck(BaseCheck):
    """log E[exp(α·RSS/2)] = −(N/2)(1−ζ)log(1−ασ0²)，与 Z 无关"""
    check_name = CheckName.NOISE_MGF
    groups = frozenset({"ml"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require(config.d < config.n, f"需要 d < N，实际 d={config.d}, N={config.n}")
        alpha = config.param("mgf_alpha")
        self.require(0 < alpha * config.sigma0_sq < 1, f"需要 0 < α·σ0² < 1，实际 α={alpha}")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        alpha = config.param("mgf_alpha")
        rtol = config.param("mgf_rtol")
        exponents = 0.5 * alpha * stats.column("rss")
        count = exponents.size

        analytic = noise_log_mgf(alpha, config.n, config.zeta, config.sigma0_sq)
        empirical = float(logsumexp(exponents) - math.log(count))
        # 对数均值的 delta 法标准误
        weights = np.exp(exponents - exponents.max())
        std_error = float(weights.std(ddof=1) / (weights.mean() * math.sqrt(count)))
        return ruled_report(
            self.name, analytic, empirical, std_error,
            abs(empirical - analytic) <= rtol * abs(analytic),
            f"|log 经验MGF − log 解析MGF| <= {rtol:g}·|log 解析MGF|",
            {"alpha": alpha},
        )


class NoiseCfCheck(BaseCheck):
    """E[exp(ia·RSS)] = (1 − 2iaσ0²)^{−N(1−ζ)/2}"""
    check_name = CheckName.NOISE_CF
    groups = frozenset({"ml"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require(config.d < config.n, f"需要 d < N，实际 d={config.d}, N={config.n}")
        self.require(config.trials >= 2, "标准误至少需要 2 个试验")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        return cf_report(
            self.name,
            stats.column("rss"),
            lambda a: noise_cf(a, config.n, config.zeta, config.sigma0_sq),
            config.param("cf_points"),
            config.param("cf_atol"),
            config.z_threshold,
        )


class NoiseTailBoundCheck(BaseCheck):
    """P(|σ̂²_ML − σ0²(1−ζ)| ≥ δ) 不超过最优 Chernoff 界"""
    check_name = CheckName.NOISE_TAIL_BOUND
    groups = frozenset({"ml"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require(config.d < config.n, f"需要 d < N，实际 d={config.d}, N={config.n}")
        delta = config.param("tail_delta")
        mean = config.sigma0_sq * (1.0 - config.zeta)
        self.require(0 < delta < mean, f"需要 0 < δ < σ0²(1−ζ) = {mean:g}，实际 δ={delta}")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        delta = config.param("tail_delta")
        tail = noise_tail_bound(delta, config.n, config.zeta, config.sigma0_sq)
        mean, _ = noise_moments(config.n, config.zeta, config.sigma0_sq)
        hits = np.abs(stats.column("sigma_ml") - mean) >= delta
        frequency = float(hits.mean())
        std_error = math.sqrt(frequency * (1.0 - frequency) / hits.size)
        return ruled_report(
            self.name, tail.bound, frequency, std_error,
            frequency <= tail.bound,
            "经验频率 <= 解析界",
            {
                "delta": delta,
                "lower_rate": tail.lower_rate,
                "upper_rate": tail.upper_rate,
                "lower_alpha": tail.lower_alpha,
                "upper_alpha": tail.upper_alpha,
            },
        )
