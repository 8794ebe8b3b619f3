"""
全自由能 F = −(1/β)·log ∫dσ² exp(−β·G(σ²))
"""

import logging
import math
from typing import Tuple

from ..core.model import NoisePrior, RegressionInstance
from ..spectra.marchenko_pastur import quad_checked
from .conditional import free_energy_bracket
from .marginal import locate_mode, sigma_search_interval

logger = logging.getLogger(__name__)

INTEGRAL_TOL = 1e-10
# 积分上限相对搜索上界的倍数
TAIL_FACTOR = 10.0


def minimize_free_energy_bracket(
    instance: RegressionInstance,
    eta: float,
    beta: float,
    prior: NoisePrior
) -> Tuple[float, float]:
    """
    在 (0, σ_max) 上最小化 G(σ²)

    Returns:
        (最小点 σ², 最小值 G)

    Raises:
        OptimizerNoBracket: G 在搜索区间内单调
    """
    if prior.is_delta:
        sigma_sq = prior.sigma_sq_0
        return sigma_sq, free_energy_bracket(instance, sigma_sq, eta, beta, prior)

    lower, upper = sigma_search_interval(instance, eta, beta)
    sigma_sq = locate_mode(lambda s: -free_energy_bracket(instance, s, eta, beta, prior), lower, upper)
    return sigma_sq, free_energy_bracket(instance, sigma_sq, eta, beta, prior)


def full_free_energy(
    instance: RegressionInstance,
    eta: float,
    beta: float,
    prior: NoisePrior,
    laplace: bool = False
) -> float:
    """
    全自由能

    有限 β 时在 log σ² 上做自适应积分（指数减去最小值）；β = +inf 或 laplace=True 时
    取 G 的最小值。Delta 先验为点质量极限 F_{β,σ0²} + (N/2)·log(2πσ0²)。

    Raises:
        QuadratureError: 积分未收敛
        OptimizerNoBracket: G 在搜索区间内单调
    """
    sigma_min, g_min = minimize_free_energy_bracket(instance, eta, beta, prior)
    if prior.is_delta or laplace or math.isinf(beta):
        return g_min

    lower, upper = sigma_search_interval(instance, eta, beta)

    def integrand(x: float) -> float:
        sigma_sq = math.exp(x)
        return math.exp(-beta * (free_energy_bracket(instance, sigma_sq, eta, beta, prior) - g_min) + x)

    mass = quad_checked(
        integrand, math.log(lower), math.log(TAIL_FACTOR * upper), INTEGRAL_TOL, points=(math.log(sigma_min),)
    )
    value = g_min - math.log(mass) / beta
    logger.debug(f"全自由能: G_min={g_min:.10g}, σ²*={sigma_min:.6g}, F={value:.10g}")
    return value
