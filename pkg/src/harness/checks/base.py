"""
校验基类模块
定义统一的校验接口：适用性检查 validate 与对照计算 evaluate
"""

import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence

import numpy as np

from ...core.exceptions import UnsupportedCheck
from ..experiment_config import ExperimentConfig
from ..report import AnalyticReport, ruled_report
from ..trials import TrialStatistics, run_trials

logger = logging.getLogger(__name__)


class CheckName(Enum):
    """校验名称枚举"""
    NOISE_MEAN = "noise-mean"
    NOISE_VAR = "noise-var"
    NOISE_MGF = "noise-mgf"
    NOISE_CF = "noise-cf"
    NOISE_TAIL_BOUND = "noise-tail-bound"
    STUDENT_T_MARGINAL_KS = "student-t-marginal-ks"
    MAP_CONDITIONAL_GAUSSIAN_KS = "map-conditional-gaussian-ks"
    MSE_MEAN = "mse-mean"
    MSE_VAR = "mse-var"
    MSE_CF = "mse-cf"
    MSE_DEVIATION_DECAY = "mse-deviation-decay"
    HELMHOLTZ = "helmholtz"
    COV_E_S_ZERO = "cov-E-S-zero"
    ML_FE_DENSITY = "ml-fe-density"
    ML_FE_VARIANCE = "ml-fe-variance"
    MAP_FE_DENSITY = "map-fe-density"
    MAP_FE_VARIANCE = "map-fe-variance"
    ASYMPTOTIC_FE = "asymptotic-fe"
    SIGMA_FIXED_POINT_BETA = "sigma-fixed-point-beta"
    SIGMA_UNBIASED_BETA1 = "sigma-unbiased-beta1"
    SIGMA_RECURSION_SELF_AVERAGING = "sigma-recursion-self-averaging"
    MP_KS = "mp-ks"


class BaseCheck(ABC):
    """校验基类"""

    check_name: CheckName
    # 主系综需要的观测量分组；需要其他系综的校验自行派生
    groups: FrozenSet[str] = frozenset()

    @property
    def name(self) -> str:
        return self.check_name.value

    def groups_for(self, config: ExperimentConfig) -> FrozenSet[str]:
        """给定配置下主系综需要的分组"""
        return self.groups

    def validate(self, config: ExperimentConfig) -> None:
        """
        检查配置是否适用

        Raises:
            UnsupportedCheck: 配置不满足该校验的前提
        """

    @abstractmethod
    def evaluate(self, config: ExperimentConfig, stats: Optional[TrialStatistics]) -> AnalyticReport:
        """
        计算解析值与经验估计并给出结论

        Args:
            config: 实验配置
            stats: 主系综的试验统计（groups 为空时为 None）

        Returns:
            AnalyticReport: 校验报告
        """

    def require(self, condition: bool, reason: str) -> None:
        if not condition:
            raise UnsupportedCheck(f"校验 {self.name} 不适用于当前配置: {reason}")

    def require_ml(self, config: ExperimentConfig) -> None:
        self.require(config.n > config.d + 1, f"需要 N > d+1，实际 N={config.n}, d={config.d}")

    def require_finite_beta(self, config: ExperimentConfig) -> None:
        self.require(math.isfinite(config.beta), "需要有限 beta")

    def require_scaled(self, config: ExperimentConfig) -> None:
        self.require(config.scaled, "需要 scaled=true（设计矩阵除以 √d）")

    def require_identity(self, config: ExperimentConfig) -> None:
        self.require(config.sigma_pop.kind == "identity", "需要 Σ = I")

    def require_ml_student(self, config: ExperimentConfig) -> None:
        self.require(config.eta == 0, f"需要 η = 0，实际 η={config.eta}")


def sized_config(config: ExperimentConfig, n: int) -> ExperimentConfig:
    """保持 ζ 不变改变 N 的派生配置"""
    d = max(1, int(round(config.zeta * n)))
    return config.with_overrides(n=n, d=d, design_mode="fresh")


def derived_run(config: ExperimentConfig, groups: Sequence[str], **overrides: Any) -> TrialStatistics:
    """同一主种子下派生配置的系综"""
    derived = config.with_overrides(**overrides) if overrides else config
    logger.info(f"运行派生系综: {overrides or '无覆盖'}")
    return run_trials(derived, groups)


def cf_report(
    check_name: str,
    samples: np.ndarray,
    analytic_of,
    points: Sequence[float],
    atol: float,
    threshold: float,
    metadata: Optional[Dict[str, Any]] = None
) -> AnalyticReport:
    """
    特征函数对照：每个 a 的实部与虚部误差都不超过 max(atol, threshold·SE)

    报告取相对容差最差的分量。
    """
    samples = np.asarray(samples, dtype=float)
    count = samples.size
    points_meta: List[Dict[str, Any]] = []
    worst = None
    passed = True
    for a in points:
        analytic = complex(analytic_of(float(a)))
        cos, sin = np.cos(a * samples), np.sin(a * samples)
        empirical = complex(cos.mean(), sin.mean())
        errors = (abs(empirical.real - analytic.real), abs(empirical.imag - analytic.imag))
        std_errors = (cos.std(ddof=1) / math.sqrt(count), sin.std(ddof=1) / math.sqrt(count))
        for error, se in zip(errors, std_errors):
            tolerance = max(atol, threshold * se)
            passed = passed and error <= tolerance
            score = error / tolerance
            if worst is None or score > worst[0]:
                worst = (score, a, analytic, empirical, se)
        points_meta.append({
            "a": float(a),
            "analytic": analytic,
            "empirical": empirical,
            "std_error": list(std_errors),
        })

    _, a, analytic, empirical, se = worst
    meta = {"points": points_meta, "worst_point": float(a), "atol": atol}
    meta.update(metadata or {})
    return ruled_report(
        check_name, abs(analytic), abs(empirical), se, passed,
        f"|误差| <= max({atol:g}, {threshold:g}·SE)（每个分量）", meta,
    )
