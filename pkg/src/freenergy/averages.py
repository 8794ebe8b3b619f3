"""
自由能密度 F/N 的系综平均与方差（高维约定，C = ZᵀZ/N 的谱密度 ρ）

ML（η = 0）:
    ⟨F/N⟩ = ½(σ0²/σ²)(1−ζ) + (ζ/2β)·log(β/(2πσ²ζ)) + (ζ/2β)∫ρ log λ
    Var(F/N) = σ0⁴(1−ζ)/(2σ⁴N) + (ζ²/4β²)∫∫C_d log λ log λ̃

MAP（θ0 ~ N(0, S²I)，c = ζσ²η）:
    ⟨F/N⟩ = ζ/2β + (S²ζη/2)∫ρλ/(λ+c) + (σ0²/2σ²)(1 − ζ∫ρλ/(λ+c))
            + (ζ/2β)∫ρ log(λ+c) − (ζ/2β)·log(2πeσ²ζ/β)
"""

import logging
import math

import numpy as np

from ..core.exceptions import DomainError, SpectrumDomainError
from ..core.model import SpectralDensity
from ..spectra.integrals import spectral_integral
from ..spectra.kernel import CorrelationKernel, kernel_double_integral, kernel_surface_integral

logger = logging.getLogger(__name__)


def _check_temperature(beta: float) -> float:
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError(f"自由能密度要求有限正 beta: {beta}")
    return 1.0 / beta


def _require_positive_support(rho: SpectralDensity) -> None:
    lower, _ = rho.support()
    if lower <= 0:
        raise SpectrumDomainError(f"谱密度在 λ = {lower} ≤ 0 处有质量，log λ 无定义")


def _require_positive_grid(corr: CorrelationKernel, shift: float = 0.0) -> None:
    if np.any(corr.grid + shift <= 0):
        raise SpectrumDomainError("相关核网格含有非正的 λ，log λ 无定义")


def ml_avg_fe_density(
    zeta: float,
    beta: float,
    sigma_sq: float,
    sigma0_sq: float,
    rho: SpectralDensity
) -> float:
    """
    ML 自由能密度的平均值

    Raises:
        SpectrumDomainError: ρ 在 λ ≤ 0 处有质量
    """
    temperature = _check_temperature(beta)
    _require_positive_support(rho)
    return (
        0.5 * (sigma0_sq / sigma_sq) * (1.0 - zeta)
        + 0.5 * zeta * temperature * math.log(beta / (2.0 * math.pi * sigma_sq * zeta))
        + 0.5 * zeta * temperature * spectral_integral(rho, np.log)
    )


def ml_energy_variance(zeta: float, sigma_sq: float, sigma0_sq: float, n: int) -> float:
    """Var(E/N) = σ0⁴(1−ζ)/(2σ⁴N)"""
    return sigma0_sq ** 2 * (1.0 - zeta) / (2.0 * sigma_sq ** 2 * n)


def ml_entropy_variance(zeta: float, corr: CorrelationKernel) -> float:
    """Var(S/N) = (ζ²/4)∫∫C_d log λ log λ̃"""
    _require_positive_grid(corr)
    return 0.25 * zeta ** 2 * kernel_double_integral(corr, np.log)


def ml_variance_kernel(lam: np.ndarray, lam_t: np.ndarray, zeta: float, beta: float) -> np.ndarray:
    """ML 方差核 (ζ²/4β²)·log λ·log λ̃"""
    temperature = _check_temperature(beta)
    return 0.25 * (zeta * temperature) ** 2 * np.log(lam) * np.log(lam_t)


def ml_fe_density_variance(
    zeta: float,
    beta: float,
    sigma_sq: float,
    sigma0_sq: float,
    n: int,
    corr: CorrelationKernel
) -> float:
    """
    ML 自由能密度的方差；能量与熵的协方差为 0

    Raises:
        SpectrumDomainError: 核网格含 λ ≤ 0
    """
    temperature = _check_temperature(beta)
    return ml_energy_variance(zeta, sigma_sq, sigma0_sq, n) + temperature ** 2 * ml_entropy_variance(zeta, corr)


def map_avg_fe_density(
    zeta: float,
    beta: float,
    sigma_sq: float,
    sigma0_sq: float,
    eta: float,
    theta_prior_var: float,
    rho: SpectralDensity
) -> float:
    """
    MAP 自由能密度对 (Z, θ0, ε) 的平均值

    η = 0 时与 ml_avg_fe_density 相同。
    """
    temperature = _check_temperature(beta)
    if eta < 0:
        raise DomainError(f"eta 必须非负: {eta}")
    c = zeta * sigma_sq * eta
    if c == 0:
        _require_positive_support(rho)
    elif rho.support()[0] + c <= 0:
        raise SpectrumDomainError("谱密度在 λ + ζσ²η ≤ 0 处有质量")

    shrink = spectral_integral(rho, lambda lam: lam / (lam + c))
    log_shifted = spectral_integral(rho, lambda lam: np.log(lam + c))
    return (
        0.5 * zeta * temperature
        + 0.5 * theta_prior_var * zeta * eta * shrink
        + 0.5 * (sigma0_sq / sigma_sq) * (1.0 - zeta * shrink)
        + 0.5 * zeta * temperature * log_shifted
        - 0.5 * zeta * temperature * math.log(2.0 * math.pi * math.e * sigma_sq * zeta * temperature)
    )


def map_variance_kernel(
    lam: np.ndarray,
    lam_t: np.ndarray,
    zeta: float,
    beta: float,
    sigma_sq: float,
    sigma0_sq: float,
    eta: float,
    theta_prior_var: float,
    literal_cross_sign: bool = False
) -> np.ndarray:
    """
    MAP 方差核 Φ(λ, λ̃)

        (ζ²/4σ⁴)(S²σ²η − σ0²)²·λλ̃/((λ+c)(λ̃+c)) + (T²ζ²/4)·log(λ+c)·log(λ̃+c)
        ± (Tζ/2σ²)·g(λ)·log(λ̃+c)
    g(λ) = S²λζσ²η/(λ+c) + σ0²(1 − λζ/(λ+c))。交叉项默认取 +，
    literal_cross_sign=True 时取 −。
    """
    temperature = _check_temperature(beta)
    lam = np.asarray(lam, dtype=float)
    lam_t = np.asarray(lam_t, dtype=float)
    c = zeta * sigma_sq * eta
    s_sq = theta_prior_var

    product = (zeta ** 2 / (4.0 * sigma_sq ** 2)) * (s_sq * sigma_sq * eta - sigma0_sq) ** 2 \
        * (lam / (lam + c)) * (lam_t / (lam_t + c))
    log_log = 0.25 * (temperature * zeta) ** 2 * np.log(lam + c) * np.log(lam_t + c)
    g = s_sq * lam * zeta * sigma_sq * eta / (lam + c) + sigma0_sq * (1.0 - lam * zeta / (lam + c))
    sign = -1.0 if literal_cross_sign else 1.0
    cross = sign * (temperature * zeta / (2.0 * sigma_sq)) * g * np.log(lam_t + c)
    return product + log_log + cross


def map_fe_density_variance(
    zeta: float,
    beta: float,
    sigma_sq: float,
    sigma0_sq: float,
    eta: float,
    theta_prior_var: float,
    corr: CorrelationKernel,
    n: int,
    literal_cross_sign: bool = False
) -> float:
    """
    MAP 自由能密度方差中的相关核项 ∫∫C_d Φ

    O(1/N) 余项没有闭式，由模拟经验估计，不在此计算。
    """
    _check_temperature(beta)
    _require_positive_grid(corr, zeta * sigma_sq * eta)
    value = kernel_surface_integral(
        corr,
        lambda lam, lam_t: map_variance_kernel(
            lam, lam_t, zeta, beta, sigma_sq, sigma0_sq, eta, theta_prior_var, literal_cross_sign
        ),
    )
    logger.debug(f"MAP 方差核项: {value:.6g} (N={n})")
    return value
