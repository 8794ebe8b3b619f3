"""
估计量的抽样分布（高维约定）

θ̂_ML − θ0 服从自由度 ν = N+1−d 的多元 Student-t，尺度矩阵 ζσ0²Σ⁻¹/(1−ζ+1/N)，
协方差 ζσ0²Σ⁻¹/(1−ζ−1/N)。给定 C 时 θ̂_MAP 为正态分布
N(C⁻¹_{c}Cθ0, ζσ0²C⁻²_{c}C)，c = ζσ²η。
"""

import math

import numpy as np
from scipy import linalg, stats
from scipy.special import gammaln

from ..core.exceptions import DegreesOfFreedomError, DomainError, ShapeError, SingularSystem
from ..estimators.point import GaussianLaw

SINGULAR_TOL = 1e-12


def _degrees_of_freedom(n: int, d: int) -> int:
    if d > n:
        raise DegreesOfFreedomError(f"Student-t 要求 d ≤ N，实际 d={d}, N={n}")
    return n + 1 - d


def _population_factor(sigma_pop: np.ndarray, d: int) -> np.ndarray:
    sigma_pop = np.atleast_2d(np.asarray(sigma_pop, dtype=float))
    if sigma_pop.shape != (d, d):
        raise ShapeError(f"sigma_pop 形状应为 {(d, d)}，实际为 {sigma_pop.shape}")
    try:
        return linalg.cholesky(sigma_pop, lower=True)
    except linalg.LinAlgError as e:
        raise DomainError(f"sigma_pop 非正定: {e}") from e


def student_t_scale_matrix(sigma_pop: np.ndarray, zeta: float, sigma0_sq: float, n: int) -> np.ndarray:
    """尺度矩阵 ζσ0²Σ⁻¹/(1−ζ+1/N)"""
    sigma_pop = np.atleast_2d(np.asarray(sigma_pop, dtype=float))
    return zeta * sigma0_sq * linalg.inv(sigma_pop) / (1.0 - zeta + 1.0 / n)


def ml_estimator_covariance(sigma_pop: np.ndarray, zeta: float, sigma0_sq: float, n: int) -> np.ndarray:
    """
    θ̂_ML 的协方差 ζσ0²Σ⁻¹/(1−ζ−1/N)

    Raises:
        DegreesOfFreedomError: N ≤ d+1
    """
    sigma_pop = np.atleast_2d(np.asarray(sigma_pop, dtype=float))
    if n <= sigma_pop.shape[0] + 1:
        raise DegreesOfFreedomError(f"协方差有限要求 N > d+1，实际 N={n}, d={sigma_pop.shape[0]}")
    return zeta * sigma0_sq * linalg.inv(sigma_pop) / (1.0 - zeta - 1.0 / n)


def student_t_logpdf(
    theta_hat: np.ndarray,
    theta0: np.ndarray,
    sigma_pop: np.ndarray,
    zeta: float,
    sigma0_sq: float,
    n: int
) -> float:
    """
    θ̂_ML 的多元 Student-t 对数密度

    尺度矩阵 Ψ = kΣ⁻¹，k = ζσ0²/(1−ζ+1/N)，故 log|Ψ| = d·log k − log|Σ|，
    二次型 xᵀΨ⁻¹x = xᵀΣx/k。

    Raises:
        DegreesOfFreedomError: d > N
    """
    theta_hat = np.atleast_1d(np.asarray(theta_hat, dtype=float))
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    d = theta0.shape[0]
    if theta_hat.shape != theta0.shape:
        raise ShapeError(f"theta_hat {theta_hat.shape} 与 theta0 {theta0.shape} 维度不一致")
    nu = _degrees_of_freedom(n, d)
    factor = _population_factor(sigma_pop, d)

    k = zeta * sigma0_sq / (1.0 - zeta + 1.0 / n)
    logdet_scale = d * math.log(k) - 2.0 * float(np.sum(np.log(np.diag(factor))))
    centered = factor.T @ (theta_hat - theta0)
    quad = float(centered @ centered) / k

    return (
        gammaln(0.5 * (nu + d)) - gammaln(0.5 * nu)
        - 0.5 * d * math.log(nu * math.pi)
        - 0.5 * logdet_scale
        - 0.5 * (nu + d) * math.log1p(quad / nu)
    )


def student_t_marginal(
    k: int,
    theta0: np.ndarray,
    sigma_pop: np.ndarray,
    zeta: float,
    sigma0_sq: float,
    n: int
):
    """第 k 个坐标的一维 Student-t 边缘分布（scipy 冻结分布）"""
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    nu = _degrees_of_freedom(n, theta0.shape[0])
    scale = student_t_scale_matrix(sigma_pop, zeta, sigma0_sq, n)
    return stats.t(df=nu, loc=theta0[k], scale=math.sqrt(scale[k, k]))


def map_conditional_gaussian(
    c_hat: np.ndarray,
    theta0: np.ndarray,
    zeta: float,
    sigma_sq: float,
    eta: float,
    sigma0_sq: float
) -> GaussianLaw:
    """
    给定样本协方差 C 时 θ̂_MAP 的条件正态分布

    通过 C 的特征分解计算 (C + c)⁻¹C θ0 与 ζσ0²(C + c)⁻²C。

    Raises:
        SingularSystem: η = 0 且 C 奇异
    """
    c_hat = np.asarray(c_hat, dtype=float)
    theta0 = np.asarray(theta0, dtype=float)
    if c_hat.shape != (theta0.size, theta0.size):
        raise ShapeError(f"C 形状 {c_hat.shape} 与 theta0 长度 {theta0.size} 不一致")
    if eta < 0:
        raise DomainError(f"eta 必须非负: {eta}")

    eigs, vectors = linalg.eigh(0.5 * (c_hat + c_hat.T))
    shifted = eigs + zeta * sigma_sq * eta
    if eigs.min() < -SINGULAR_TOL * max(1.0, eigs.max()) or shifted.min() <= SINGULAR_TOL * max(1.0, shifted.max()):
        raise SingularSystem("C + ζσ²η 奇异，无法构造条件分布")

    mean = vectors @ ((eigs / shifted) * (vectors.T @ theta0))
    covariance = (vectors * (zeta * sigma0_sq * eigs / shifted ** 2)) @ vectors.T
    return GaussianLaw(mean, 0.5 * (covariance + covariance.T))
