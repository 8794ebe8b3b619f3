"""
噪声方差 σ² 的不动点

对单个数据集迭代 v_{t+1} = Ψ[v_t]：
    Ψ(v) = β/(β−ζ)·RSS_v/N − v²η·Tr[J⁻¹_{vη}]/((β−ζ)N) + 2v²β/((β−ζ)N)·∂log P(v)
其中 RSS_v 为 θ̂(v) 的残差平方和。β = +inf 时三项系数变为 (1, 0, 2v²/N)。

高维极限下用谱密度 ρ 代替数据，得到确定性映射 ⟨Ψ⟩ 及其无序方差。
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.exceptions import DomainError, NoConvergence, TemperatureOutOfRange
from ..core.linalg import RidgeSystem
from ..core.model import NoisePrior, RegressionInstance, SpectralDensity
from ..spectra.integrals import spectral_integral
from ..spectra.kernel import CorrelationKernel, kernel_double_integral

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 500
DAMPING = 0.5


@dataclass(frozen=True)
class SigmaSolve:
    """σ² 不动点求解结果"""
    sigma_sq: float
    iterations: int
    residual: float


def _coefficients(beta: float, zeta: float) -> Tuple[float, float, float]:
    """
    Ψ 中残差项、迹项与先验项的温度系数

    Returns:
        (β/(β−ζ), 1/(β−ζ), β/(β−ζ))，β = +inf 时为 (1, 0, 1)

    Raises:
        TemperatureOutOfRange: 有限 β ≤ ζ
    """
    if math.isinf(beta):
        return 1.0, 0.0, 1.0
    if not beta > zeta:
        raise TemperatureOutOfRange(f"有限温度下要求 beta > zeta: beta={beta}, zeta={zeta}")
    gap = beta - zeta
    return beta / gap, 1.0 / gap, beta / gap


def sigma_recursion_step(
    v: float,
    instance: RegressionInstance,
    eta: float,
    beta: float,
    prior: NoisePrior
) -> float:
    """
    计算一次 Ψ[v | Z, θ0, ε]

    Args:
        v: 当前 σ² 迭代值
        instance: 回归实例
        eta: 岭强度
        beta: 逆温度（可为 +inf）
        prior: 噪声先验；Delta 先验直接返回其固定值

    Returns:
        float: Ψ(v)

    Raises:
        TemperatureOutOfRange: 有限 β ≤ ζ
    """
    if not v > 0:
        raise DomainError(f"v 必须为正: {v}")
    if eta < 0:
        raise DomainError(f"eta 必须非负: {eta}")
    residual_coef, trace_coef, prior_coef = _coefficients(beta, instance.zeta)
    if prior.is_delta:
        return prior.sigma_sq_0

    n = instance.n
    system = RidgeSystem(instance.design, v * eta)
    residual = instance.targets - instance.design @ system.estimate(instance.targets)
    value = residual_coef * float(residual @ residual) / n
    if eta > 0 and trace_coef > 0:
        value -= trace_coef * v * v * eta * system.trace_inverse() / n
    slope = prior.log_density_derivative(v)
    if slope != 0.0:
        value += 2.0 * prior_coef * v * v * slope / n
    return value


def _damped_fixed_point(step, start: float, tol: float, max_iter: int, label: str) -> SigmaSolve:
    v = start
    defect = math.inf
    for iteration in range(1, max_iter + 1):
        image = step(v)
        defect = abs(image - v) / v
        logger.debug(f"{label} 第 {iteration} 步: v={v:.12g}, Ψ(v)={image:.12g}, 相对缺陷={defect:.3e}")
        if defect <= tol:
            return SigmaSolve(v, iteration, defect)
        v = (1.0 - DAMPING) * v + DAMPING * image
        if not v > 0:
            raise NoConvergence(f"{label} 迭代值变为非正: {v}", last_iterate=v, defect=defect, iterations=iteration)
    raise NoConvergence(
        f"{label} 在 {max_iter} 步内未收敛，最终相对缺陷 {defect:.3e}",
        last_iterate=v,
        defect=defect,
        iterations=max_iter,
    )


def solve_sigma(
    instance: RegressionInstance,
    eta: float,
    beta: float,
    prior: NoisePrior,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER
) -> SigmaSolve:
    """
    θ̂ 与 σ² 的联合不动点（阻尼迭代，γ = 0.5）

    初值为 η 岭回归的残差均方；每个迭代值都重新求解 θ̂。

    Raises:
        TemperatureOutOfRange: 有限 β ≤ ζ
        NoConvergence: max_iter 步内未收敛
    """
    _coefficients(beta, instance.zeta)
    if prior.is_delta:
        return SigmaSolve(prior.sigma_sq_0, 0, 0.0)

    system = RidgeSystem(instance.design, eta)
    residual = instance.targets - instance.design @ system.estimate(instance.targets)
    start = max(float(residual @ residual) / instance.n, np.finfo(float).tiny)

    result = _damped_fixed_point(
        lambda v: sigma_recursion_step(v, instance, eta, beta, prior),
        start, tol, max_iter, "σ² 不动点",
    )
    logger.debug(f"σ² 不动点收敛: σ²={result.sigma_sq:.12g}, 迭代 {result.iterations} 次")
    return result


def deterministic_sigma_map(
    v: float,
    zeta: float,
    eta: float,
    beta: float,
    sigma0_sq: float,
    theta_prior_var: float,
    rho: SpectralDensity,
    prior: NoisePrior,
    n: int
) -> float:
    """
    确定性映射 ⟨Ψ⟩(v)

    记 c = ζvη，r(λ) = c/(λ+c)：
        ⟨Ψ⟩ = β/(β−ζ)·[σ0²(1−ζ+ζ∫ρr²) + S²∫ρλr²] − v²ηζ²/(β−ζ)·∫ρ/(λ+c)
              + 2v²β/((β−ζ)N)·∂log P(v)

    Raises:
        TemperatureOutOfRange: 有限 β ≤ ζ
    """
    if not v > 0:
        raise DomainError(f"v 必须为正: {v}")
    residual_coef, trace_coef, prior_coef = _coefficients(beta, zeta)
    if prior.is_delta:
        return prior.sigma_sq_0

    value = residual_coef * sigma0_sq * (1.0 - zeta)
    if eta > 0:
        c = zeta * v * eta
        ratio_sq = lambda lam: (c / (lam + c)) ** 2
        value += residual_coef * sigma0_sq * zeta * spectral_integral(rho, ratio_sq)
        if theta_prior_var > 0:
            value += residual_coef * theta_prior_var * spectral_integral(rho, lambda lam: lam * ratio_sq(lam))
        if trace_coef > 0:
            value -= trace_coef * v * v * eta * zeta * zeta * spectral_integral(rho, lambda lam: 1.0 / (lam + c))
    slope = prior.log_density_derivative(v)
    if slope != 0.0:
        value += 2.0 * prior_coef * v * v * slope / n
    return value


def deterministic_sigma_map_variance(
    v: float,
    zeta: float,
    eta: float,
    beta: float,
    sigma0_sq: float,
    theta_prior_var: float,
    rho: SpectralDensity,
    corr: CorrelationKernel,
    n: int
) -> float:
    """
    Ψ(v) 的无序方差

    设计矩阵的涨落由相关核给出 ∫∫C_d A(λ)A(λ̃)，
    A(λ) = β/(β−ζ)·r²(σ0²ζ + S²λ) − v²ηζ²/((β−ζ)(λ+c))；
    噪声与 θ0 的涨落给出 (2/N)(β/(β−ζ))²∫ρ{σ0⁴[1−ζ+ζr⁴] + (S⁴/ζ)r⁴λ²}。
    """
    residual_coef, trace_coef, _ = _coefficients(beta, zeta)
    c = zeta * v * eta
    s_sq = theta_prior_var

    def ratio(lam):
        return c / (lam + c) if c > 0 else np.zeros_like(np.asarray(lam, dtype=float))

    def design_part(lam):
        lam = np.asarray(lam, dtype=float)
        value = residual_coef * ratio(lam) ** 2 * (sigma0_sq * zeta + s_sq * lam)
        if c > 0 and trace_coef > 0:
            value = value - trace_coef * v * v * eta * zeta * zeta / (lam + c)
        return value

    kernel_term = kernel_double_integral(corr, design_part)
    noise_term = spectral_integral(
        rho,
        lambda lam: sigma0_sq ** 2 * (1.0 - zeta + zeta * ratio(lam) ** 4)
        + (s_sq ** 2 / zeta) * ratio(lam) ** 4 * np.asarray(lam, dtype=float) ** 2,
    )
    return kernel_term + 2.0 * residual_coef ** 2 * noise_term / n


def deterministic_sigma_fixed_point(
    zeta: float,
    eta: float,
    beta: float,
    sigma0_sq: float,
    theta_prior_var: float,
    rho: SpectralDensity,
    prior: NoisePrior,
    n: int,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER
) -> SigmaSolve:
    """确定性映射的阻尼不动点，初值取 η = 0 时的值 βσ0²(1−ζ)/(β−ζ)"""
    residual_coef, _, _ = _coefficients(beta, zeta)
    if prior.is_delta:
        return SigmaSolve(prior.sigma_sq_0, 0, 0.0)
    return _damped_fixed_point(
        lambda v: deterministic_sigma_map(v, zeta, eta, beta, sigma0_sq, theta_prior_var, rho, prior, n),
        residual_coef * sigma0_sq * (1.0 - zeta), tol, max_iter, "确定性映射",
    )
