"""
估计量分布的 KS 校验
"""

import math
from typing import Optional

import numpy as np
from scipy import stats as sps

from ...analytics import map_conditional_gaussian, ml_estimator_covariance, student_t_marginal
from ...spectra import sample_covariance
from ..experiment_config import ExperimentConfig
from ..report import AnalyticReport, ruled_report
from ..trials import TrialStatistics, fixed_design, run_trials
from .base import BaseCheck, CheckName


class StudentTMarginalKsCheck(BaseCheck):
    """θ̂_ML − θ0 的单个坐标服从 Student-t 边缘分布，对角协方差为 ζσ0²Σ⁻¹/(1−ζ−1/N)"""
    check_name = CheckName.STUDENT_T_MARGINAL_KS
    groups = frozenset({"ml"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_ml(config)
        self.require_scaled(config)
        self.require(config.design_mode == "fresh", "Student-t 律是对设计矩阵平均后的分布，需要 design_mode=fresh")
        self.require(config.param("ks_coordinate") < config.d, "ks_coordinate 超出维度")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        k = config.param("ks_coordinate")
        sigma_pop = config.sigma_matrix()
        deviations = stats.column("theta_ml_dev")
        law = student_t_marginal(k, np.zeros(config.d), sigma_pop, config.zeta, config.sigma0_sq, config.n)
        ks = sps.kstest(deviations, law.cdf)

        variance = float(ml_estimator_covariance(sigma_pop, config.zeta, config.sigma0_sq, config.n)[k, k])
        empirical = float(deviations.var(ddof=1))
        std_error = empirical * math.sqrt(2.0 / max(deviations.size - 1, 1))
        ks_alpha, cov_rtol = config.param("ks_alpha"), config.param("cov_rtol")
        passed = ks.pvalue > ks_alpha and abs(empirical - variance) <= cov_rtol * variance
        return ruled_report(
            self.name, variance, empirical, std_error, passed,
            f"KS p > {ks_alpha:g} 且 |经验方差 − 解析方差| <= {cov_rtol:g}·解析方差",
            {"coordinate": k, "ks_statistic": float(ks.statistic), "p_value": float(ks.pvalue),
             "degrees_of_freedom": config.n + 1 - config.d},
        )


class MapConditionalGaussianKsCheck(BaseCheck):
    """
    固定设计下 θ̂_MAP 的条件正态律

    派生固定设计、确定性 θ0 的系综；坐标 k 与 N((C+c)⁻¹Cθ0, ζσ0²(C+c)⁻²C) 的边缘分布做 KS 检验。
    """
    check_name = CheckName.MAP_CONDITIONAL_GAUSSIAN_KS

    def validate(self, config: ExperimentConfig) -> None:
        self.require_scaled(config)
        self.require(config.param("ks_coordinate") < config.d, "ks_coordinate 超出维度")
        self.require(config.d < config.n or config.eta > 0, "η = 0 时需要 d < N")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        k = config.param("ks_coordinate")
        derived = config.with_overrides(design_mode="fixed", theta_prior_var=0.0)
        samples = run_trials(derived, {"map"}).column("theta_map")

        design = fixed_design(derived)
        theta0 = np.full(derived.d, derived.theta0_value)
        law = map_conditional_gaussian(
            sample_covariance(design, True), theta0, derived.zeta,
            derived.student_sigma_sq, derived.eta, derived.sigma0_sq,
        )
        marginal = law.marginal(k)
        ks = sps.kstest(samples, marginal.cdf)

        analytic = float(marginal.mean())
        empirical = float(samples.mean())
        std_error = float(samples.std(ddof=1) / math.sqrt(samples.size))
        ks_alpha = config.param("ks_alpha")
        return ruled_report(
            self.name, analytic, empirical, std_error, ks.pvalue > ks_alpha,
            f"KS p > {ks_alpha:g}",
            {"coordinate": k, "ks_statistic": float(ks.statistic), "p_value": float(ks.pvalue),
             "analytic_std": float(marginal.std()), "empirical_std": float(samples.std(ddof=1))},
        )
