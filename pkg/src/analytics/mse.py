"""
ML 估计的均方误差 MSE = ‖θ0 − θ̂_ML‖²/d（高维约定）

特征函数（针对和 ‖θ0 − θ̂‖²）：
    ∫dω Γ_ν(ω)·Π_ℓ (1 − 2iaψ_ℓ/ω)^{−1/2}，ν = N+1−d，ψ_ℓ = ζσ0²/((1−ζ+1/N)λ_ℓ)
偏差界 P(|MSE − μ| ≥ δ) ≲ C−·exp(−NΦ−[α, μ(λ_d), δ]) + C+·exp(−NΦ+[α, μ(λ_1), δ])，
μ(λ) = ζσ0²/((1−ζ)λ)，C± 取 1。
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize, stats
from scipy.special import gammaln

from ..core.exceptions import (
    AlphaOutOfRange,
    DegreesOfFreedomError,
    DeltaOutOfRange,
    DomainError,
    QuadratureError,
    ShapeError,
)
from ..core.model import RateFunctionEval

logger = logging.getLogger(__name__)

CF_TOL = 1e-10
QUANTILE_TAIL = 1e-12
ALPHA_XTOL = 1e-8
BOUND_LABEL = "exponent-order bound"


def gamma_density(nu: float, omega: float) -> float:
    """
    Γ_ν(ω) = ν^{ν/2}/(2^{ν/2}Γ(ν/2))·ω^{(ν−2)/2}·e^{−νω/2}，均值为 1

    Raises:
        DomainError: ν 或 ω 非正
    """
    if not (nu > 0 and omega > 0):
        raise DomainError(f"gamma_density 要求 nu > 0 且 omega > 0: nu={nu}, omega={omega}")
    half = 0.5 * nu
    return math.exp(
        half * math.log(nu) - half * math.log(2.0) - gammaln(half)
        + (half - 1.0) * math.log(omega) - half * omega
    )


def _eigs(d: int, sigma_pop_eigs: Sequence[float]) -> np.ndarray:
    eigs = np.asarray(sigma_pop_eigs, dtype=float)
    if eigs.shape != (d,):
        raise ShapeError(f"需要 {d} 个总体特征值，实际 {eigs.shape}")
    if np.any(eigs <= 0):
        raise DomainError("总体特征值必须为正")
    return eigs


def mse_mean_var(n: int, d: int, sigma0_sq: float, sigma_pop_eigs: Sequence[float]) -> Tuple[float, float]:
    """
    MSE 的均值 ζσ0²/(1−ζ−1/N)·Tr[Σ⁻¹]/d 与大 (N,d) 方差 2ζ²σ0⁴/(1−ζ)²·Tr[Σ⁻²]/d²

    Raises:
        DegreesOfFreedomError: N ≤ d+1
    """
    if n <= d + 1:
        raise DegreesOfFreedomError(f"MSE 均值要求 N > d+1，实际 N={n}, d={d}")
    eigs = _eigs(d, sigma_pop_eigs)
    zeta = d / n
    mean = zeta * sigma0_sq / (1.0 - zeta - 1.0 / n) * float(np.sum(1.0 / eigs)) / d
    var = 2.0 * zeta ** 2 * sigma0_sq ** 2 / (1.0 - zeta) ** 2 * float(np.sum(eigs ** -2.0)) / d ** 2
    return mean, var


def mse_second_moment(n: int, d: int, sigma0_sq: float, sigma_pop_eigs: Sequence[float]) -> float:
    """
    有限 N 的精确二阶矩
    ζ²σ0⁴/((1−ζ−1/N)(1−ζ−3/N))·[(Tr Σ⁻¹/d)² + 2Tr Σ⁻²/d²]

    Raises:
        DegreesOfFreedomError: N ≤ d+3
    """
    if n <= d + 3:
        raise DegreesOfFreedomError(f"二阶矩要求 N > d+3，实际 N={n}, d={d}")
    eigs = _eigs(d, sigma_pop_eigs)
    zeta = d / n
    prefactor = zeta ** 2 * sigma0_sq ** 2 / ((1.0 - zeta - 1.0 / n) * (1.0 - zeta - 3.0 / n))
    return prefactor * ((float(np.sum(1.0 / eigs)) / d) ** 2 + 2.0 * float(np.sum(eigs ** -2.0)) / d ** 2)


def mse_cf(a: float, n: int, d: int, sigma0_sq: float, sigma_pop_eigs: Sequence[float]) -> complex:
    """
    ‖θ0 − θ̂_ML‖² 的特征函数

    在 Γ_ν 的 1e-12 与 1−1e-12 分位点之间对 ω 做自适应积分，乘积取复对数之和。

    Raises:
        DegreesOfFreedomError: d > N
        QuadratureError: 积分未收敛
    """
    if d > n:
        raise DegreesOfFreedomError(f"特征函数要求 d ≤ N，实际 d={d}, N={n}")
    eigs = _eigs(d, sigma_pop_eigs)
    zeta = d / n
    nu = n + 1 - d
    psi = zeta * sigma0_sq / ((1.0 - zeta + 1.0 / n) * eigs)

    law = stats.gamma(a=0.5 * nu, scale=2.0 / nu)
    lower, upper = law.ppf(QUANTILE_TAIL), law.ppf(1.0 - QUANTILE_TAIL)

    def integrand(omega: float) -> np.ndarray:
        value = gamma_density(nu, omega) * np.exp(-0.5 * np.sum(np.log(1.0 - 2j * a * psi / omega)))
        return np.array([value.real, value.imag])

    values, error, info = integrate.quad_vec(
        integrand, lower, upper, epsabs=CF_TOL, epsrel=CF_TOL, full_output=True
    )
    if not info.success:
        raise QuadratureError(f"MSE 特征函数积分未收敛: 误差估计 {error:.3e}")
    return complex(values[0], values[1])


def mu_of(lam: float, zeta: float, sigma0_sq: float) -> float:
    """μ(λ) = ζσ0²/((1−ζ)λ)"""
    return zeta * sigma0_sq / ((1.0 - zeta) * lam)


def minus_alpha_limit(mu: float, zeta: float) -> float:
    """负分支 α 的上界 (1−√ζ)²/((1−ζ)μ)"""
    return (1.0 - math.sqrt(zeta)) ** 2 / ((1.0 - zeta) * mu)


def mse_rate_minus(
    alpha: float,
    mu: float,
    zeta: float,
    delta: float = 0.0,
    exact_substitution: bool = False
) -> RateFunctionEval:
    """
    负分支（上尾 MSE ≥ μ + δ）的鞍点与速率

        φ−(ω) = (1−ζ)log ω − (1−ζ)ω + ζ log(ω/(ω − α))
        ω0⁻ = (1+αμ)/2 + √(((1+αμ)/2)² − αμ/(1−ζ))
        Φ− = ½[ζ − 1 − φ−(ω0⁻) + αζ(μ + δ)]
    exact_substitution=True 时 φ− 的最后一项用 αμ 代替 α。

    Raises:
        AlphaOutOfRange: αμ ∉ (0, (1−√ζ)²/(1−ζ)) 或 ω0⁻ 不大于极点
    """
    if not (alpha > 0 and mu > 0):
        raise AlphaOutOfRange(f"alpha 与 mu 必须为正: alpha={alpha}, mu={mu}")
    limit = minus_alpha_limit(mu, zeta)
    if not alpha < limit:
        raise AlphaOutOfRange(f"负分支要求 alpha < {limit:.6g}: alpha={alpha}")

    x = alpha * mu
    half = 0.5 * (1.0 + x)
    saddle = half + math.sqrt(max(half * half - x / (1.0 - zeta), 0.0))
    pole = x if exact_substitution else alpha
    if not saddle > pole:
        raise AlphaOutOfRange(f"鞍点 ω0⁻={saddle:.6g} 不大于极点 {pole:.6g}")

    phi = (1.0 - zeta) * math.log(saddle) - (1.0 - zeta) * saddle + zeta * math.log(saddle / (saddle - pole))
    rate = 0.5 * (zeta - 1.0 - phi + alpha * zeta * (mu + delta))
    return RateFunctionEval(alpha, saddle, rate, (0.0, limit), "minus")


def mse_rate_plus(alpha: float, mu: float, zeta: float, delta: float = 0.0) -> RateFunctionEval:
    """
    正分支（下尾 MSE ≤ μ − δ）的鞍点与速率，对所有 α > 0 有效

        φ+(ω) = (1−ζ)log ω − (1−ζ)ω + ζ log(ω/(ω + αμ))
        ω0⁺ = ½(1 − αμ + √((αμ − 1)² + 4αμ/(1−ζ)))
        Φ+ = ½[ζ − 1 − φ+(ω0⁺) − αζ(μ − δ)]
    """
    if not (alpha > 0 and mu > 0):
        raise AlphaOutOfRange(f"alpha 与 mu 必须为正: alpha={alpha}, mu={mu}")
    x = alpha * mu
    saddle = 0.5 * (1.0 - x + math.sqrt((x - 1.0) ** 2 + 4.0 * x / (1.0 - zeta)))
    phi = (1.0 - zeta) * math.log(saddle) - (1.0 - zeta) * saddle + zeta * math.log(saddle / (saddle + x))
    rate = 0.5 * (zeta - 1.0 - phi - alpha * zeta * (mu - delta))
    return RateFunctionEval(alpha, saddle, rate, (0.0, math.inf), "plus")


def mse_rate_functions(
    alpha: float,
    mu: float,
    zeta: float,
    delta: float = 0.0,
    exact_substitution: bool = False
) -> Tuple[RateFunctionEval, RateFunctionEval]:
    """同一 (α, μ, δ) 下的 (负分支, 正分支)"""
    return (
        mse_rate_minus(alpha, mu, zeta, delta, exact_substitution),
        mse_rate_plus(alpha, mu, zeta, delta),
    )


@dataclass(frozen=True)
class MseDeviationBound:
    """MSE 偏差的指数阶上界（C± = 1）"""
    bound: float
    rate_minus: float
    rate_plus: float
    alpha_minus: float
    alpha_plus: float
    mu_upper_tail: float
    mu_lower_tail: float
    # Φ− > 0 的充分条件：μ(λ_d) ≥ 1 或 δ > 1 − μ(λ_d)
    minus_positive: bool
    plus_positive: bool
    label: str = BOUND_LABEL


def _best_alpha(rate_of, lower: float, upper: float) -> float:
    def objective(alpha: float) -> float:
        try:
            return -rate_of(alpha)
        except AlphaOutOfRange:
            return math.inf

    result = optimize.minimize_scalar(objective, bounds=(lower, upper), method="bounded",
                                      options={"xatol": ALPHA_XTOL * upper})
    return float(result.x)


def mse_deviation_bound(
    delta: float,
    alpha: float,
    n: int,
    d: int,
    sigma0_sq: float,
    lambda_min: float,
    lambda_max: float,
    zeta: float,
    optimize_alpha: bool = False,
    exact_substitution: bool = False,
    alpha_plus: Optional[float] = None
) -> MseDeviationBound:
    """
    exp(−NΦ−[α, μ(λ_d), δ]) + exp(−NΦ+[α, μ(λ_1), δ])

    Args:
        delta: 偏差 δ
        alpha: 两个分支共用的 α（optimize_alpha=True 时作为初值被忽略）
        lambda_min, lambda_max: Σ 的最小与最大特征值
        optimize_alpha: 各分支在有效区间内用有界 Brent 法最大化速率
        alpha_plus: 正分支单独使用的 α

    Raises:
        DeltaOutOfRange: δ 非正
        AlphaOutOfRange: α 超出负分支有效区间
    """
    if not (delta > 0 and math.isfinite(delta)):
        raise DeltaOutOfRange(f"delta 必须为正有限数: {delta}")
    if not 0 < lambda_min <= lambda_max:
        raise DomainError(f"特征值范围无效: [{lambda_min}, {lambda_max}]")
    mu_upper = mu_of(lambda_max, zeta, sigma0_sq)
    mu_lower = mu_of(lambda_min, zeta, sigma0_sq)

    def minus(a: float) -> float:
        return mse_rate_minus(a, mu_upper, zeta, delta, exact_substitution).rate

    def plus(a: float) -> float:
        return mse_rate_plus(a, mu_lower, zeta, delta).rate

    if optimize_alpha:
        alpha_minus = _best_alpha(minus, 1e-12, minus_alpha_limit(mu_upper, zeta) * (1.0 - 1e-9))
        alpha_plus = _best_alpha(plus, 1e-12, 100.0 / mu_lower)
    else:
        alpha_minus = alpha
        alpha_plus = alpha if alpha_plus is None else alpha_plus

    rate_minus, rate_plus = minus(alpha_minus), plus(alpha_plus)
    bound = math.exp(-n * rate_minus) + math.exp(-n * rate_plus)
    logger.debug(f"MSE 偏差界: Φ−={rate_minus:.6g} (α={alpha_minus:.4g}), Φ+={rate_plus:.6g} (α={alpha_plus:.4g})")
    return MseDeviationBound(
        bound=bound,
        rate_minus=rate_minus,
        rate_plus=rate_plus,
        alpha_minus=alpha_minus,
        alpha_plus=alpha_plus,
        mu_upper_tail=mu_upper,
        mu_lower_tail=mu_lower,
        minus_positive=mu_upper >= 1.0 or delta > 1.0 - mu_upper,
        plus_positive=delta < mu_lower,
    )
