"""
自由能相关校验：Helmholtz 恒等式、E/S 协方差、ML/MAP 平均与方差、渐近自由能密度
"""

import math
from typing import Optional

from ...core.model import SpectralDensity
from ...freenergy import (
    asymptotic_ml_fe,
    map_avg_fe_density,
    map_fe_density_variance,
    ml_avg_fe_density,
    ml_energy_variance,
    ml_entropy_variance,
    ml_fe_density_variance,
)
from ..experiment_config import ExperimentConfig
from ..report import AnalyticReport, ruled_report, statistical_report
from ..trials import TrialStatistics
from .base import BaseCheck, CheckName


class HelmholtzCheck(BaseCheck):
    """每个实例满足 F = E − T·S"""
    check_name = CheckName.HELMHOLTZ
    groups = frozenset({"fe"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_finite_beta(config)

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        tol = config.param("helmholtz_tol")
        defect = float(stats.column("helmholtz_defect").max())
        return ruled_report(
            self.name, 0.0, defect, 0.0, defect <= tol,
            f"max |F − (E − T·S)|/max(1,|F|) <= {tol:g}",
            {"instances": stats.count},
            z=0.0,
        )


class CovEnergyEntropyCheck(BaseCheck):
    """ML 时 Cov(E/N, S/N) = 0：能量只依赖噪声，熵只依赖设计矩阵"""
    check_name = CheckName.COV_E_S_ZERO
    groups = frozenset({"fe"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_finite_beta(config)
        self.require_ml_student(config)
        self.require(config.trials >= 2, "协方差至少需要 2 个试验")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        energy, entropy = stats.column("energy"), stats.column("entropy")
        products = (energy - energy.mean()) * (entropy - entropy.mean())
        covariance = float(stats.moments.covariance[stats.moments.index("energy"), stats.moments.index("entropy")])
        std_error = float(products.std(ddof=1) / math.sqrt(products.size))
        return statistical_report(self.name, 0.0, covariance, std_error, config.z_threshold)


class MlFeDensityCheck(BaseCheck):
    """ML 自由能密度的系综平均"""
    check_name = CheckName.ML_FE_DENSITY
    groups = frozenset({"fe", "eigenvalues"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_finite_beta(config)
        self.require_ml_student(config)
        self.require_scaled(config)

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        sigma_sq = config.student_sigma_sq
        analytic = ml_avg_fe_density(config.zeta, config.beta, sigma_sq, config.sigma0_sq, stats.pooled_density())
        metadata = {}
        if config.sigma_pop.kind == "identity":
            metadata["marchenko_pastur_value"] = ml_avg_fe_density(
                config.zeta, config.beta, sigma_sq, config.sigma0_sq, SpectralDensity.marchenko_pastur(config.zeta)
            )
        return statistical_report(
            self.name, analytic, stats.mean("fe"), stats.std_error("fe"), config.z_threshold, metadata
        )


class MlFeVarianceCheck(BaseCheck):
    """ML 自由能密度方差 = 能量项 + 由相关核给出的熵项"""
    check_name = CheckName.ML_FE_VARIANCE
    groups = frozenset({"fe", "eigenvalues"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_finite_beta(config)
        self.require_ml_student(config)
        self.require_scaled(config)

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        kernel = stats.correlation_kernel()
        analytic = ml_fe_density_variance(
            config.zeta, config.beta, config.student_sigma_sq, config.sigma0_sq, config.n, kernel
        )
        energy_term = ml_energy_variance(config.zeta, config.student_sigma_sq, config.sigma0_sq, config.n)
        entropy_term = ml_entropy_variance(config.zeta, kernel) / config.beta ** 2
        empirical = stats.variance("fe")
        rtol = config.param("ml_fe_var_rtol")
        std_error = empirical * math.sqrt(2.0 / max(stats.count - 1, 1))
        return ruled_report(
            self.name, analytic, empirical, std_error,
            abs(empirical - analytic) <= rtol * analytic,
            f"|经验方差 − 解析方差| <= {rtol:g}·解析方差",
            {
                "kernel_bins": int(kernel.grid.size),
                "kernel_ensemble": kernel.ensemble_size,
                "energy_term": energy_term,
                "entropy_term": entropy_term,
                "entropy_share": entropy_term / analytic,
            },
        )


class MapFeDensityCheck(BaseCheck):
    """MAP 自由能密度对 (Z, θ0, ε) 的平均；η > 0 时要求随机教师 S² > 0"""
    check_name = CheckName.MAP_FE_DENSITY
    groups = frozenset({"fe", "eigenvalues"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_finite_beta(config)
        self.require_scaled(config)
        self.require(config.eta == 0 or config.theta_prior_var > 0, "η > 0 时需要 theta_prior_var > 0")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        analytic = map_avg_fe_density(
            config.zeta, config.beta, config.student_sigma_sq, config.sigma0_sq,
            config.eta, config.theta_prior_var, stats.pooled_density(),
        )
        return statistical_report(self.name, analytic, stats.mean("fe"), stats.std_error("fe"), config.z_threshold)


class MapFeVarianceCheck(BaseCheck):
    """
    MAP 方差核项 ∫∫C_d Φ 与 F/N 的设计条件均值跨设计方差的对照

    总方差与 O(1/N) 余项写入 metadata。
    """
    check_name = CheckName.MAP_FE_VARIANCE
    groups = frozenset({"fe", "fe_cond_mean", "eigenvalues"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_finite_beta(config)
        self.require_scaled(config)
        self.require(config.design_mode == "fresh", "设计矩阵的涨落需要 design_mode=fresh")
        self.require(config.eta == 0 or config.theta_prior_var > 0, "η > 0 时需要 theta_prior_var > 0")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        kernel = stats.correlation_kernel()
        analytic = map_fe_density_variance(
            config.zeta, config.beta, config.student_sigma_sq, config.sigma0_sq,
            config.eta, config.theta_prior_var, kernel, config.n,
            literal_cross_sign=bool(config.param("literal_cross_sign")),
        )
        empirical = stats.variance("fe_cond_mean")
        total = stats.variance("fe")
        rtol = config.param("map_fe_var_rtol")
        std_error = empirical * math.sqrt(2.0 / max(stats.count - 1, 1))
        return ruled_report(
            self.name, analytic, empirical, std_error,
            abs(empirical - analytic) <= rtol * abs(analytic),
            f"|条件均值方差 − 核项| <= {rtol:g}·|核项|",
            {"total_variance": total, "remainder": total - empirical,
             "kernel_bins": int(kernel.grid.size)},
        )


class AsymptoticFeCheck(BaseCheck):
    """Σ = I、平坦先验时全自由能密度趋于渐近闭式 f_β"""
    check_name = CheckName.ASYMPTOTIC_FE
    groups = frozenset({"fe_full"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_finite_beta(config)
        self.require_ml_student(config)
        self.require_identity(config)
        self.require_scaled(config)
        self.require(config.prior.kind.value == "flat", "渐近闭式对应平坦先验")
        self.require(config.beta > config.zeta, f"需要 β > ζ，实际 β={config.beta}, ζ={config.zeta}")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        analytic = asymptotic_ml_fe(config.zeta, config.beta, config.sigma0_sq)
        empirical = stats.mean("fe_full")
        atol = config.param("asymptotic_fe_atol")
        return ruled_report(
            self.name, analytic, empirical, stats.std_error("fe_full"),
            abs(empirical - analytic) <= atol,
            f"|经验均值 − 渐近值| <= {atol:g}",
        )
