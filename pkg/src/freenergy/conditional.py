"""
条件自由能 F_{β,σ²}

    F = d/(2β) + tᵀ(I − ZJ⁻¹_{σ²η}Zᵀ)t/(2σ²) − (1/2β)·log|2πe·σ²β⁻¹J⁻¹_{σ²η}|

平均能量 E = d/(2β) + min_θ E(θ|D)，微分熵 S = ½·log|2πe·σ²β⁻¹J⁻¹_{σ²η}|，F = E − T·S。
"""

import math

from ..core.exceptions import DomainError, SingularSystem
from ..core.linalg import RidgeSystem
from ..core.model import FreeEnergyBreakdown, NoisePrior, RegressionInstance


def _system(instance: RegressionInstance, sigma_sq: float, eta: float) -> RidgeSystem:
    if not sigma_sq > 0:
        raise DomainError(f"sigma_sq 必须为正: {sigma_sq}")
    if eta < 0:
        raise DomainError(f"eta 必须非负: {eta}")
    if eta == 0 and instance.n < instance.d:
        raise SingularSystem(f"η = 0 时要求 N ≥ d，实际 N={instance.n}, d={instance.d}")
    return RidgeSystem(instance.design, sigma_sq * eta)


def conditional_free_energy(
    instance: RegressionInstance,
    sigma_sq: float,
    eta: float,
    beta: float
) -> FreeEnergyBreakdown:
    """
    条件自由能及其 Helmholtz 分解

    Args:
        instance: 回归实例
        sigma_sq: 学生端噪声方差 σ²
        eta: 岭强度 η
        beta: 有限正的逆温度

    Returns:
        FreeEnergyBreakdown: (F, E, S, T)

    Raises:
        DomainError: β 非有限正数
        SingularSystem: J_{σ²η} 非正定
    """
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError(f"条件自由能要求有限正 beta: {beta}")
    system = _system(instance, sigma_sq, eta)
    d = instance.d
    temperature = 1.0 / beta

    avg_energy = 0.5 * d * temperature + system.quadratic_form(instance.targets) / (2.0 * sigma_sq)
    entropy = 0.5 * (d * math.log(2.0 * math.pi * math.e * sigma_sq * temperature) - system.logdet())
    return FreeEnergyBreakdown(
        free_energy=avg_energy - temperature * entropy,
        avg_energy=avg_energy,
        entropy=entropy,
        temperature=temperature,
    )


def conditional_free_energy_value(
    instance: RegressionInstance,
    sigma_sq: float,
    eta: float,
    beta: float
) -> float:
    """F_{β,σ²}；β = +inf 时为 min_θ E(θ|D)"""
    if math.isinf(beta):
        return _system(instance, sigma_sq, eta).quadratic_form(instance.targets) / (2.0 * sigma_sq)
    return conditional_free_energy(instance, sigma_sq, eta, beta).free_energy


def free_energy_bracket(
    instance: RegressionInstance,
    sigma_sq: float,
    eta: float,
    beta: float,
    prior: NoisePrior
) -> float:
    """
    σ² 的有效势 G(σ²) = F_{β,σ²} + (N/2)·log(2πσ²) − log P(σ²)

    σ² 的边缘分布正比于 exp(−βG)，全自由能为 −(1/β)·log ∫exp(−βG)。
    Delta 先验是点质量，不含 log P 项。
    """
    value = (
        conditional_free_energy_value(instance, sigma_sq, eta, beta)
        + 0.5 * instance.n * math.log(2.0 * math.pi * sigma_sq)
    )
    if prior.is_delta:
        return value
    return value - prior.log_density(sigma_sq)
