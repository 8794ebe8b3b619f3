"""
Monte Carlo 试验执行

第 k 个试验使用 SeedSpec(master_seed, k)，按用途拆分子流采样 θ0、Z 与 ε，
计算所需观测量。试验按固定大小分块在线程池上执行，各块的矩统计按块编号顺序合并，
因此结果与 worker 数和调度顺序无关。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.exceptions import DomainError, TrialFailure
from ..core.model import RegressionInstance, SpectralDensity
from ..estimators import map_estimate, ml_estimate, sigma_recursion_step, solve_sigma
from ..freenergy import conditional_free_energy, full_free_energy, map_avg_fe_density
from ..sampler import SeedSpec, sample_design, sample_instance
from ..sampler.rng import UINT64_MAX
from ..spectra import (
    CorrelationKernel,
    covariance_eigenvalues,
    empirical_density,
    estimate_correlation_kernel,
    pooled_density,
)
from .aggregate import StreamingMoments, merge_in_order
from .experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

BLOCK_SIZE = 32
# 固定设计系综所用设计矩阵的流编号，不与任何试验编号重合
FIXED_DESIGN_STREAM = UINT64_MAX

# 观测量分组 -> 该组产生的列
OBSERVABLE_GROUPS: Dict[str, Tuple[str, ...]] = {
    "ml": ("sigma_ml", "rss", "mse", "mse_sum", "theta_ml_dev"),
    "map": ("theta_map",),
    "fe": ("fe", "energy", "entropy", "helmholtz_defect"),
    "fe_cond_mean": ("fe_cond_mean",),
    "fe_full": ("fe_full",),
    "psi": ("psi_v0",),
    "sigma_fixed": ("sigma_fixed",),
    "eigenvalues": (),
}


def default_groups(config: ExperimentConfig) -> FrozenSet[str]:
    """simulate 子命令默认计算的分组"""
    groups = {"map"}
    if config.d < config.n:
        groups.add("ml")
    if math.isfinite(config.beta):
        groups.add("fe")
    return frozenset(groups)


def fixed_design(config: ExperimentConfig, sigma_pop: Optional[np.ndarray] = None) -> np.ndarray:
    """固定设计系综共用的设计矩阵"""
    if sigma_pop is None:
        sigma_pop = config.sigma_matrix()
    return sample_design(config.n, config.d, sigma_pop, config.scaled, SeedSpec(config.master_seed, FIXED_DESIGN_STREAM))


class TrialContext:
    """单个试验：实例与各观测量按需计算并缓存"""

    def __init__(
        self,
        config: ExperimentConfig,
        index: int,
        sigma_pop: np.ndarray,
        design: Optional[np.ndarray] = None
    ):
        self.config = config
        self.index = index
        self.seed = SeedSpec(config.master_seed, index)
        self._sigma_pop = sigma_pop
        self._design = design

    @cached_property
    def instance(self) -> RegressionInstance:
        config = self.config
        theta0 = None
        if config.theta_prior_var == 0:
            theta0 = np.full(config.d, config.theta0_value)
        return sample_instance(
            config.n,
            config.d,
            self._sigma_pop,
            config.sigma0_sq,
            config.theta_prior_var,
            self.seed,
            scaled=config.scaled,
            theta0=theta0,
            design=self._design,
        )

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return covariance_eigenvalues(self.instance.design, self.config.scaled)

    @cached_property
    def theta_ml(self) -> np.ndarray:
        return ml_estimate(self.instance)

    def ml_observables(self) -> Dict[str, float]:
        instance = self.instance
        residual = instance.targets - instance.design @ self.theta_ml
        rss = float(residual @ residual)
        deviation = self.theta_ml - instance.theta0
        mse_sum = float(deviation @ deviation)
        return {
            "sigma_ml": rss / instance.n,
            "rss": rss,
            "mse": mse_sum / instance.d,
            "mse_sum": mse_sum,
            "theta_ml_dev": float(deviation[self.config.param("ks_coordinate")]),
        }

    def map_observables(self) -> Dict[str, float]:
        config = self.config
        theta = map_estimate(self.instance, config.student_sigma_sq, config.eta)
        return {"theta_map": float(theta[config.param("ks_coordinate")])}

    def fe_observables(self) -> Dict[str, float]:
        config = self.config
        n = self.instance.n
        breakdown = conditional_free_energy(self.instance, config.student_sigma_sq, config.eta, config.beta)
        return {
            "fe": breakdown.free_energy / n,
            "energy": breakdown.avg_energy / n,
            "entropy": breakdown.entropy / n,
            "helmholtz_defect": breakdown.helmholtz_defect,
        }

    def fe_cond_mean(self) -> float:
        """给定 Z 时 F/N 对 (θ0, ε) 的精确均值"""
        config = self.config
        return map_avg_fe_density(
            self.instance.zeta, config.beta, config.student_sigma_sq, config.sigma0_sq,
            config.eta, config.theta_prior_var, empirical_density(self.eigenvalues),
        )

    def recursion_start(self) -> float:
        v0 = self.config.param("recursion_v0")
        return self.config.sigma0_sq if v0 is None else float(v0)

    def observe(self, groups: Iterable[str]) -> Dict[str, float]:
        """计算请求分组的观测量，返回一行"""
        config = self.config
        row: Dict[str, float] = {}
        for group in sorted(groups):
            if group == "ml":
                row.update(self.ml_observables())
            elif group == "map":
                row.update(self.map_observables())
            elif group == "fe":
                row.update(self.fe_observables())
            elif group == "fe_cond_mean":
                row["fe_cond_mean"] = self.fe_cond_mean()
            elif group == "fe_full":
                row["fe_full"] = full_free_energy(self.instance, config.eta, config.beta, config.prior) / self.instance.n
            elif group == "psi":
                row["psi_v0"] = sigma_recursion_step(
                    self.recursion_start(), self.instance, config.eta, config.beta, config.prior
                )
            elif group == "sigma_fixed":
                row["sigma_fixed"] = solve_sigma(self.instance, config.eta, config.beta, config.prior).sigma_sq
            elif group == "eigenvalues":
                # 特征值不进入矩统计，由 _run_block 收集
                continue
            else:
                raise DomainError(f"未知的观测量分组: {group}。可用分组: {', '.join(OBSERVABLE_GROUPS)}")
        return row


@dataclass
class TrialStatistics:
    """
    一次运行的结果

    Attributes:
        table: 每个成功试验一行，按试验编号排序
        moments: 按块编号顺序合并的流式矩
        eigenvalues: 请求 eigenvalues 分组时的特征值系综
        failures: 失败试验的编号与错误信息
    """
    config: ExperimentConfig
    table: pd.DataFrame
    moments: StreamingMoments
    eigenvalues: Optional[List[np.ndarray]] = None
    failures: List[Dict[str, object]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return self.moments.count

    def column(self, name: str) -> np.ndarray:
        if name not in self.table.columns:
            raise KeyError(f"未记录的观测量: {name}。已记录: {', '.join(self.table.columns)}")
        return self.table[name].to_numpy(dtype=float)

    def mean(self, name: str) -> float:
        return float(self.moments.mean[self.moments.index(name)])

    def variance(self, name: str) -> float:
        return float(self.moments.variance[self.moments.index(name)])

    def std_error(self, name: str) -> float:
        return float(self.moments.std_error[self.moments.index(name)])

    def pooled_density(self) -> SpectralDensity:
        if not self.eigenvalues:
            raise DomainError("本次运行未记录特征值")
        return pooled_density(self.eigenvalues)

    def correlation_kernel(self) -> CorrelationKernel:
        if not self.eigenvalues:
            raise DomainError("本次运行未记录特征值")
        return estimate_correlation_kernel(self.eigenvalues, self.config.kernel_bins)

    def summary(self) -> Dict[str, object]:
        """可 JSON 序列化的聚合结果"""
        return {
            "config_hash": self.config.config_hash,
            "master_seed": self.config.master_seed,
            "trials": self.config.trials,
            "completed": self.count,
            "failures": list(self.failures),
            "observables": self.moments.summary(),
            "covariance": {
                "names": list(self.moments.names),
                "matrix": self.moments.covariance.tolist(),
            },
        }


def _blocks(trials: int) -> List[range]:
    return [range(start, min(start + BLOCK_SIZE, trials)) for start in range(0, trials, BLOCK_SIZE)]


def _run_block(
    config: ExperimentConfig,
    indices: range,
    groups: FrozenSet[str],
    sigma_pop: np.ndarray,
    design: Optional[np.ndarray]
) -> Tuple[List[Dict[str, float]], List[np.ndarray], List[Dict[str, object]]]:
    rows, eigenvalues, failures = [], [], []
    for index in indices:
        context = TrialContext(config, index, sigma_pop, design)
        try:
            row = context.observe(groups)
            if "eigenvalues" in groups:
                eigenvalues.append(context.eigenvalues)
        except Exception as e:
            logger.error(f"试验 {index} 出错: {type(e).__name__}: {str(e)}")
            failures.append({"trial": index, "error": type(e).__name__, "message": str(e), "cause": e})
            continue
        row["trial"] = index
        rows.append(row)
    return rows, eigenvalues, failures


def run_trials(config: ExperimentConfig, groups: Optional[Iterable[str]] = None) -> TrialStatistics:
    """
    执行 config.trials 个独立试验并聚合

    Args:
        config: 实验配置
        groups: 观测量分组，None 时使用 default_groups

    Returns:
        TrialStatistics: 逐试验表、流式矩与（可选）特征值系综

    Raises:
        TrialFailure: 失败试验数超过 failure_budget，携带第一个失败试验的编号与原因
    """
    groups = default_groups(config) if groups is None else frozenset(groups)
    unknown = sorted(set(groups) - set(OBSERVABLE_GROUPS))
    if unknown:
        raise DomainError(f"未知的观测量分组: {', '.join(unknown)}。可用分组: {', '.join(OBSERVABLE_GROUPS)}")
    names = tuple(sorted(name for group in groups for name in OBSERVABLE_GROUPS[group]))

    sigma_pop = config.sigma_matrix()
    design = fixed_design(config, sigma_pop) if config.design_mode == "fixed" else None
    blocks = _blocks(config.trials)
    logger.info(
        f"开始运行 {config.trials} 个试验: N={config.n}, d={config.d}, 分组={sorted(groups)}, "
        f"{len(blocks)} 个块, {config.workers} 个 worker"
    )

    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        results = list(executor.map(lambda block: _run_block(config, block, groups, sigma_pop, design), blocks))

    rows: List[Dict[str, float]] = []
    eigenvalues: List[np.ndarray] = []
    failures: List[Dict[str, object]] = []
    parts = []
    for block_rows, block_eigs, block_failures in results:
        rows.extend(block_rows)
        eigenvalues.extend(block_eigs)
        failures.extend(block_failures)
        values = np.array([[row[name] for name in names] for row in block_rows], dtype=float)
        parts.append(StreamingMoments.from_block(names, values.reshape(len(block_rows), len(names))))

    if len(failures) > config.failure_budget:
        first = failures[0]
        raise TrialFailure(
            f"{len(failures)} 个试验失败，超过允许的 {config.failure_budget} 个；"
            f"第一个失败试验 {first['trial']}: {first['message']}",
            trial_index=first["trial"],
            cause=first["cause"],
        )
    if failures:
        logger.warning(f"{len(failures)} 个试验失败，在允许范围内已跳过")

    table = pd.DataFrame(rows, columns=["trial", *names]).set_index("trial")
    moments = merge_in_order(parts, names)
    logger.info(f"试验完成: 成功 {moments.count} 个, 失败 {len(failures)} 个")
    return TrialStatistics(
        config=config,
        table=table,
        moments=moments,
        eigenvalues=eigenvalues if "eigenvalues" in groups else None,
        failures=[{k: v for k, v in f.items() if k != "cause"} for f in failures],
    )
