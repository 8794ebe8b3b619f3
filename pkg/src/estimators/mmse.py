"""
MMSE 估计：对 σ² 的边缘分布求平均

    P(σ²|D) ∝ exp(−[F_{1,σ²} + (N/2)·log(2πσ²) − log P(σ²)])
    θ̂_MMSE = ⟨J⁻¹_{σ²η}Zᵀt⟩，σ̂²_MMSE = ⟨σ²⟩
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..core.exceptions import QuadratureError
from ..core.model import NoisePrior, RegressionInstance
from ..freenergy.conditional import free_energy_bracket
from ..freenergy.marginal import LOWER_FRACTION, UPPER_FACTOR, initial_residual_mean_square, locate_mode
from .point import map_estimate

logger = logging.getLogger(__name__)

MMSE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MMSEEstimate:
    """后验均值估计"""
    theta: np.ndarray
    sigma_sq: float
    # 边缘分布的众数与 log ∫exp(−G)
    mode: float
    log_normalizer: float


def mmse_estimate(
    instance: RegressionInstance,
    eta: float,
    prior: NoisePrior,
    tol: float = MMSE_TOL
) -> MMSEEstimate:
    """
    β = 1 的后验均值估计

    在 (0, 10·初始残差均方) 上对 σ² 做自适应积分，指数先减去最大值避免下溢。
    Delta 先验直接返回固定 σ² 处的 MAP 估计。

    Raises:
        QuadratureError: 积分未收敛
    """
    if prior.is_delta:
        sigma_sq = prior.sigma_sq_0
        theta = map_estimate(instance, sigma_sq, eta)
        return MMSEEstimate(theta, sigma_sq, sigma_sq, -free_energy_bracket(instance, sigma_sq, eta, 1.0, prior))

    upper = UPPER_FACTOR * initial_residual_mean_square(instance, eta)
    lower = upper * LOWER_FRACTION

    def log_weight(sigma_sq: float) -> float:
        return -free_energy_bracket(instance, sigma_sq, eta, 1.0, prior)

    mode = locate_mode(log_weight, lower, upper)
    shift = log_weight(mode)

    def integrand(sigma_sq: float) -> np.ndarray:
        weight = math.exp(log_weight(sigma_sq) - shift)
        theta = map_estimate(instance, sigma_sq, eta)
        return np.concatenate(([weight, weight * sigma_sq], weight * theta))

    values, error, info = integrate.quad_vec(
        integrand, lower, upper, epsabs=0.0, epsrel=tol, points=(mode,), full_output=True
    )
    if not info.success or values[0] <= 0:
        raise QuadratureError(f"MMSE 积分未收敛: 状态 {info.status}, 误差估计 {error:.3e}")

    norm = values[0]
    logger.debug(f"MMSE 积分完成: 众数 σ²={mode:.6g}, 归一化常数 {norm:.6g}")
    return MMSEEstimate(values[2:] / norm, values[1] / norm, mode, shift + math.log(norm))
