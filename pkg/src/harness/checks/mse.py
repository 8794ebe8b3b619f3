"""
ML 估计误差 MSE = ‖θ0 − θ̂_ML‖²/d 的校验
"""

import logging
import math
from typing import Optional

import numpy as np

from ...analytics import mse_cf, mse_deviation_bound, mse_mean_var, mse_second_moment, mu_of
from ..experiment_config import ExperimentConfig
from ..report import AnalyticReport, ruled_report, statistical_report
from ..trials import TrialStatistics, run_trials
from .base import BaseCheck, CheckName, cf_report, sized_config

logger = logging.getLogger(__name__)


class _MseCheck(BaseCheck):
    groups = frozenset({"ml"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require_ml(config)
        self.require_scaled(config)


class MseMeanCheck(_MseCheck):
    """E[MSE] = ζσ0²/(1−ζ−1/N)·TrΣ⁻¹/d"""
    check_name = CheckName.MSE_MEAN

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        mean, _ = mse_mean_var(config.n, config.d, config.sigma0_sq, config.sigma_pop_eigenvalues())
        return statistical_report(self.name, mean, stats.mean("mse"), stats.std_error("mse"), config.z_threshold)


class MseVarCheck(_MseCheck):
    """
    Var[MSE] = E[MSE²] − E[MSE]²（有限 N 精确值）

    大 (N,d) 极限 2ζ²σ0⁴/(1−ζ)²·TrΣ⁻²/d² 只写入 metadata：它漏掉了 (TrΣ⁻¹/d)² 项的
    O(1/d) 修正，N=200、d=100 时约为精确值的一半。
    """
    check_name = CheckName.MSE_VAR

    def validate(self, config: ExperimentConfig) -> None:
        super().validate(config)
        self.require(config.n > config.d + 3, f"MSE 方差要求 N > d+3，实际 N={config.n}, d={config.d}")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        eigs = config.sigma_pop_eigenvalues()
        mean, large_n = mse_mean_var(config.n, config.d, config.sigma0_sq, eigs)
        variance = mse_second_moment(config.n, config.d, config.sigma0_sq, eigs) - mean ** 2
        empirical = stats.variance("mse")
        rtol = config.param("mse_var_rtol")
        std_error = empirical * math.sqrt(2.0 / max(stats.count - 1, 1))
        return ruled_report(
            self.name, variance, empirical, std_error,
            abs(empirical - variance) <= rtol * variance,
            f"|经验方差 − 解析方差| <= {rtol:g}·解析方差",
            {"large_n_variance": large_n},
        )


class MseCfCheck(_MseCheck):
    """‖θ0 − θ̂_ML‖² 的特征函数（对 Γ 分布的一维积分）"""
    check_name = CheckName.MSE_CF

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        eigs = config.sigma_pop_eigenvalues()
        return cf_report(
            self.name,
            stats.column("mse_sum"),
            lambda a: mse_cf(a, config.n, config.d, config.sigma0_sq, eigs),
            config.param("cf_points"),
            config.param("cf_atol"),
            config.z_threshold,
        )


class MseDeviationDecayCheck(BaseCheck):
    """
    固定 δ 下偏差频率随 N 的指数衰减

    两个规模 N1 < N2（ζ 不变）各跑一个系综，比较 log 频率之比与指数之比
    N2·Φ(N2)/(N1·Φ(N1))，Φ 取两分支速率的较小者（C± = 1 的指数阶界）。
    偏差事件 |MSE − c| ≥ δ 的中心 c 取各规模的有限 N 均值 ζσ0²/(1−ζ−1/N)。
    """
    check_name = CheckName.MSE_DEVIATION_DECAY

    def validate(self, config: ExperimentConfig) -> None:
        self.require_identity(config)
        self.require_scaled(config)
        sizes = config.param("decay_sizes")
        self.require(len(sizes) == 2 and 0 < sizes[0] < sizes[1], f"decay_sizes 需要两个递增的 N: {sizes}")
        for n in sizes:
            d = int(round(config.zeta * n))
            self.require(1 <= d < n - 1, f"N={n} 时 d={d} 不满足 1 ≤ d < N−1")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        delta = config.param("mse_delta_fraction") * mu_of(1.0, config.zeta, config.sigma0_sq)
        levels = []
        for n in config.param("decay_sizes"):
            sized = sized_config(config, n)
            mse = run_trials(sized, {"ml"}).column("mse")
            center, _ = mse_mean_var(sized.n, sized.d, config.sigma0_sq, np.ones(sized.d))
            frequency = float(np.mean(np.abs(mse - center) >= delta))
            bound = mse_deviation_bound(
                delta, 1e-3, sized.n, sized.d, config.sigma0_sq, 1.0, 1.0, sized.zeta, optimize_alpha=True
            )
            exponent = sized.n * min(bound.rate_minus, bound.rate_plus)
            levels.append({
                "n": sized.n,
                "d": sized.d,
                "frequency": frequency,
                "trials": int(mse.size),
                "center": center,
                "exponent": exponent,
                "rate_minus": bound.rate_minus,
                "rate_plus": bound.rate_plus,
                "bound": bound.bound,
            })
            logger.info(f"MSE 偏差: N={sized.n}, 频率={frequency:.4g}, 指数={exponent:.4g}")

        first, second = levels
        factor = config.param("decay_factor")
        valid = (
            0 < first["frequency"] < 1 and 0 < second["frequency"] < 1
            and first["exponent"] > 0 and second["exponent"] > 0
        )
        analytic = second["exponent"] / first["exponent"] if first["exponent"] > 0 else math.nan
        empirical = math.log(second["frequency"]) / math.log(first["frequency"]) if valid else math.nan
        passed = valid and analytic / factor <= empirical <= analytic * factor
        note = None if valid else "频率为 0 或 1，或速率非正，无法比较衰减"
        return ruled_report(
            self.name, analytic, empirical, math.nan, passed,
            f"log 频率之比位于指数之比的 1/{factor:g} 到 {factor:g} 倍之间",
            {"delta": delta, "levels": levels, "note": note, "label": bound.label},
            z=math.nan,
        )
