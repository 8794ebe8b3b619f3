"""
σ² 不动点与递推的校验
"""

import logging
import math
from typing import FrozenSet, Optional

import numpy as np

from ...core.model import NoisePriorKind
from ...estimators import deterministic_sigma_fixed_point
from ..experiment_config import ExperimentConfig
from ..report import AnalyticReport, ruled_report, statistical_report
from ..trials import TrialStatistics, run_trials
from .base import BaseCheck, CheckName, derived_run, sized_config

logger = logging.getLogger(__name__)


class SigmaFixedPointBetaCheck(BaseCheck):
    """
    σ² 不动点

    β = +inf、η = 0、平坦先验时不动点就是 σ̂²_ML（机器精度恒等式）；
    其余情形与确定性映射 ⟨Ψ⟩ 的不动点比较（谱密度取主系综的平均谱）。
    """
    check_name = CheckName.SIGMA_FIXED_POINT_BETA

    @staticmethod
    def _is_identity_case(config: ExperimentConfig) -> bool:
        return math.isinf(config.beta) and config.eta == 0 and config.prior.kind is NoisePriorKind.FLAT

    def groups_for(self, config: ExperimentConfig) -> FrozenSet[str]:
        if self._is_identity_case(config):
            return frozenset({"sigma_fixed", "ml"})
        if config.eta > 0:
            return frozenset({"sigma_fixed", "eigenvalues"})
        return frozenset({"sigma_fixed"})

    def validate(self, config: ExperimentConfig) -> None:
        self.require(math.isinf(config.beta) or config.beta > config.zeta,
                     f"有限 β 需要 β > ζ，实际 β={config.beta}, ζ={config.zeta}")
        if config.eta > 0:
            self.require_scaled(config)
        self.require(config.trials >= 2, "标准误至少需要 2 个试验")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        fixed = stats.column("sigma_fixed")
        if self._is_identity_case(config):
            ml = stats.column("sigma_ml")
            defect = float(np.max(np.abs(fixed - ml) / ml))
            tol = config.param("identity_rtol")
            return ruled_report(
                self.name, 0.0, defect, 0.0, defect <= tol,
                f"max |σ²_不动点 − σ̂²_ML|/σ̂²_ML <= {tol:g}",
                z=0.0,
            )

        rho = stats.pooled_density() if config.eta > 0 else None
        solve = deterministic_sigma_fixed_point(
            config.zeta, config.eta, config.beta, config.sigma0_sq, config.theta_prior_var,
            rho, config.prior, config.n,
        )
        return statistical_report(
            self.name, solve.sigma_sq, stats.mean("sigma_fixed"), stats.std_error("sigma_fixed"),
            config.z_threshold, {"deterministic_iterations": solve.iterations},
        )


class SigmaUnbiasedBeta1Check(BaseCheck):
    """β = 1、η = 0、平坦先验时不动点是 σ0² 的无偏估计"""
    check_name = CheckName.SIGMA_UNBIASED_BETA1

    def validate(self, config: ExperimentConfig) -> None:
        self.require(config.prior.kind is NoisePriorKind.FLAT, "需要平坦先验")
        self.require(config.d < config.n, f"需要 d < N，实际 d={config.d}, N={config.n}")
        self.require(config.trials >= 2, "标准误至少需要 2 个试验")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        derived = derived_run(config, {"sigma_fixed"}, beta=1.0, eta=0.0)
        return statistical_report(
            self.name, config.sigma0_sq, derived.mean("sigma_fixed"), derived.std_error("sigma_fixed"),
            config.z_threshold,
        )


class SigmaRecursionSelfAveragingCheck(BaseCheck):
    """Ψ[v0] 的无序方差按 1/N 缩小：两个规模的方差之比接近 N2/N1"""
    check_name = CheckName.SIGMA_RECURSION_SELF_AVERAGING

    def validate(self, config: ExperimentConfig) -> None:
        self.require_identity(config)
        self.require(math.isinf(config.beta) or config.beta > config.zeta,
                     f"有限 β 需要 β > ζ，实际 β={config.beta}, ζ={config.zeta}")
        self.require(config.prior.kind is not NoisePriorKind.DELTA, "Delta 先验下 Ψ 为常数")
        sizes = config.param("self_avg_sizes")
        self.require(len(sizes) == 2 and 0 < sizes[0] < sizes[1], f"self_avg_sizes 需要两个递增的 N: {sizes}")
        for n in sizes:
            d = int(round(config.zeta * n))
            self.require(1 <= d < n or config.eta > 0, f"N={n} 时 d={d} 无效")
        self.require(config.trials >= 2, "方差至少需要 2 个试验")

    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        levels = []
        for n in config.param("self_avg_sizes"):
            sized = sized_config(config, n)
            run = run_trials(sized, {"psi"})
            levels.append({
                "n": sized.n,
                "d": sized.d,
                "mean": run.mean("psi_v0"),
                "variance": run.variance("psi_v0"),
                "trials": run.count,
            })
            logger.info(f"Ψ 自平均: N={sized.n}, 方差={levels[-1]['variance']:.4g}")

        first, second = levels
        analytic = second["n"] / first["n"]
        empirical = first["variance"] / second["variance"] if second["variance"] > 0 else math.inf
        # 方差比的相对标准误
        relative = math.sqrt(2.0 / (first["trials"] - 1) + 2.0 / (second["trials"] - 1))
        factor = config.param("self_avg_factor")
        return ruled_report(
            self.name, analytic, empirical, empirical * relative,
            analytic / factor <= empirical <= analytic * factor,
            f"方差比位于 N2/N1 的 1/{factor:g} 到 {factor:g} 倍之间",
            {"levels": levels},
        )
