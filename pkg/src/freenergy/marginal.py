"""
σ² 的边缘分布 P(σ²|D) ∝ exp(−β·G(σ²))
"""

import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy import integrate, optimize

from ..core.exceptions import DomainError, EmptySupport, OptimizerNoBracket
from ..core.linalg import RidgeSystem
from ..core.model import NoisePrior, RegressionInstance
from .conditional import free_energy_bracket

logger = logging.getLogger(__name__)

UPPER_FACTOR = 10.0
LOWER_FRACTION = 1e-10
GRID_POINTS = 200


def initial_residual_mean_square(instance: RegressionInstance, eta: float) -> float:
    """η 岭回归（σ² = 1）的残差均方"""
    system = RidgeSystem(instance.design, eta)
    residual = instance.targets - instance.design @ system.estimate(instance.targets)
    return float(residual @ residual) / instance.n


def sigma_search_interval(instance: RegressionInstance, eta: float, beta: float) -> Tuple[float, float]:
    """σ² 的搜索区间 (0, σ_max)，有限 β 时按 β/(β−ζ) 放大上界"""
    upper = UPPER_FACTOR * max(initial_residual_mean_square(instance, eta), np.finfo(float).tiny)
    if math.isfinite(beta) and beta > instance.zeta:
        upper *= max(1.0, beta / (beta - instance.zeta))
    return upper * LOWER_FRACTION, upper


def locate_mode(log_weight: Callable[[float], float], lower: float, upper: float) -> float:
    """
    在对数网格上定位 log 权重的最大值，再用有界 Brent 细化

    Raises:
        OptimizerNoBracket: 最大值落在区间端点（目标在区间内单调）
    """
    grid = np.geomspace(lower, upper, GRID_POINTS)
    values = np.array([log_weight(s) for s in grid])
    k = int(np.argmax(values))
    if k == 0 or k == GRID_POINTS - 1:
        raise OptimizerNoBracket(f"σ² 搜索区间 ({lower:.3e}, {upper:.3e}) 内目标单调，无法构造括号")
    result = optimize.minimize_scalar(
        lambda x: -log_weight(math.exp(x)),
        bounds=(math.log(grid[k - 1]), math.log(grid[k + 1])),
        method="bounded",
        options={"xatol": 1e-12},
    )
    best = math.exp(result.x)
    return best if log_weight(best) >= values[k] else float(grid[k])


def marginal_sigma_density(
    instance: RegressionInstance,
    eta: float,
    beta: float,
    prior: NoisePrior,
    grid: np.ndarray
) -> np.ndarray:
    """
    网格上归一化的 σ² 边缘密度（梯形法则归一化）

    Args:
        grid: 严格为正且递增的 σ² 网格

    Raises:
        EmptySupport: 网格上的密度全部下溢
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or grid[0] <= 0 or np.any(np.diff(grid) <= 0):
        raise DomainError("σ² 网格必须严格为正且递增")
    if not math.isfinite(beta):
        raise DomainError("β = +inf 时边缘分布退化为点质量")

    log_weight = np.array([-beta * free_energy_bracket(instance, s, eta, beta, prior) for s in grid])
    finite = np.isfinite(log_weight)
    if not np.any(finite):
        raise EmptySupport("σ² 网格上的对数密度全部非有限")
    weight = np.where(finite, np.exp(log_weight - log_weight[finite].max()), 0.0)
    norm = integrate.trapezoid(weight, grid)
    if not norm > 0:
        raise EmptySupport("σ² 网格上的密度全部下溢")
    return weight / norm
