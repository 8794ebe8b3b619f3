"""
点估计与 Gibbs 条件分布

θ̂ = J⁻¹_{σ²η}Zᵀt，J_{σ²η} = ZᵀZ + σ²η·I；η = 0 即最大似然估计。
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..core.exceptions import DomainError, SingularSystem
from ..core.linalg import RidgeSystem
from ..core.model import RegressionInstance

logger = logging.getLogger(__name__)

PD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GaussianLaw:
    """多元正态分布 N(mean, covariance)"""
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        cov = np.asarray(self.covariance, dtype=float)
        scale = max(1.0, float(np.abs(cov).max(initial=0.0)))
        if np.max(np.abs(cov - cov.T), initial=0.0) > PD_TOL * scale:
            raise DomainError("协方差矩阵不对称")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as e:
            raise SingularSystem(f"协方差矩阵非正定: {e}") from e

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def frozen(self):
        """对应的 scipy 分布对象"""
        return stats.multivariate_normal(mean=self.mean, cov=self.covariance)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        factor = np.linalg.cholesky(self.covariance)
        return self.mean + rng.standard_normal((size, self.dim)) @ factor.T

    def logpdf(self, x: np.ndarray) -> float:
        return float(self.frozen().logpdf(x))

    def marginal(self, k: int):
        """第 k 个坐标的边缘分布"""
        return stats.norm(loc=self.mean[k], scale=math.sqrt(self.covariance[k, k]))


def _ridge_system(instance: RegressionInstance, sigma_sq: float, eta: float) -> RidgeSystem:
    if eta < 0:
        raise DomainError(f"eta 必须非负: {eta}")
    if not sigma_sq > 0:
        raise DomainError(f"sigma_sq 必须为正: {sigma_sq}")
    if eta == 0 and instance.n < instance.d:
        raise SingularSystem(f"η = 0 时要求 N ≥ d，实际 N={instance.n}, d={instance.d}")
    return RidgeSystem(instance.design, sigma_sq * eta)


def map_estimate(instance: RegressionInstance, sigma_sq: float, eta: float) -> np.ndarray:
    """
    MAP 估计 θ̂ = (ZᵀZ + σ²η·I)⁻¹Zᵀt

    Args:
        instance: 回归实例
        sigma_sq: 学生端噪声方差 σ²
        eta: 岭强度 η

    Returns:
        np.ndarray: 长度 d 的估计向量

    Raises:
        SingularSystem: η = 0 且设计矩阵列不满秩
        DomainError: η < 0
    """
    return _ridge_system(instance, sigma_sq, eta).estimate(instance.targets)


def ml_estimate(instance: RegressionInstance) -> np.ndarray:
    """最大似然估计 θ̂ = (ZᵀZ)⁻¹Zᵀt"""
    return map_estimate(instance, 1.0, 0.0)


def ml_noise_estimate(instance: RegressionInstance) -> float:
    """σ̂²_ML = ‖t − Zθ̂_ML‖²/N"""
    residual = instance.targets - instance.design @ ml_estimate(instance)
    return float(residual @ residual) / instance.n


def ml_noise_estimate_projector(instance: RegressionInstance) -> float:
    """σ̂²_ML 的投影形式 εᵀ(I − Z(ZᵀZ)⁻¹Zᵀ)ε/N"""
    return _ridge_system(instance, 1.0, 0.0).quadratic_form(instance.noise) / instance.n


def ridge_objective(theta: np.ndarray, instance: RegressionInstance, sigma_sq: float, eta: float) -> float:
    """能量中依赖 θ 的部分 (1/2σ²)‖t − Zθ‖² + (η/2)‖θ‖²"""
    residual = instance.targets - instance.design @ theta
    return float(residual @ residual) / (2.0 * sigma_sq) + 0.5 * eta * float(theta @ theta)


def gibbs_conditional(
    instance: RegressionInstance,
    sigma_sq: float,
    eta: float,
    beta: float
) -> GaussianLaw:
    """
    固定 σ² 时 θ 的 Gibbs 分布

    均值为 MAP 估计，协方差为 (σ²/β)·J⁻¹_{σ²η}。

    Raises:
        DomainError: β 非有限正数
        SingularSystem: J_{σ²η} 非正定
    """
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError(f"Gibbs 条件分布要求有限正 beta: {beta}")
    system = _ridge_system(instance, sigma_sq, eta)
    covariance = (sigma_sq / beta) * system.inverse()
    return GaussianLaw(system.estimate(instance.targets), covariance)

