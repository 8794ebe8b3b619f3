"""
数据生成：设计矩阵、真实参数与目标值
"""

import logging
import math
from typing import Optional

import numpy as np

from ..core.exceptions import CovarianceNotPD, DomainError, ShapeError
from ..core.model import RegressionInstance
from .rng import SeedSpec, StreamPurpose

logger = logging.getLogger(__name__)


def _lower_cholesky(sigma_pop: np.ndarray) -> np.ndarray:
    try:
        factor = np.linalg.cholesky(sigma_pop)
    except np.linalg.LinAlgError as e:
        raise CovarianceNotPD(f"总体协方差 Cholesky 分解失败: {e}") from e
    if np.any(np.diag(factor) <= 0):
        raise CovarianceNotPD("总体协方差 Cholesky 分解出现非正主元")
    return factor


def sample_design(
    n: int,
    d: int,
    sigma_pop: np.ndarray,
    scaled: bool,
    seed: SeedSpec
) -> np.ndarray:
    """
    采样设计矩阵，每行独立服从 N(0, Σ)

    Args:
        n: 样本数 N
        d: 维度 d
        sigma_pop: d×d 总体协方差
        scaled: 为 True 时所有元素除以 √d
        seed: 种子

    Returns:
        np.ndarray: N×d 设计矩阵

    Raises:
        CovarianceNotPD: Σ 非正定
    """
    if n < 1 or d < 1:
        raise DomainError(f"n 与 d 必须为正整数: n={n}, d={d}")
    sigma_pop = np.asarray(sigma_pop, dtype=float)
    if sigma_pop.shape != (d, d):
        raise ShapeError(f"sigma_pop 形状应为 {(d, d)}，实际为 {sigma_pop.shape}")

    factor = _lower_cholesky(sigma_pop)
    gaussian = seed.generator(StreamPurpose.DESIGN).standard_normal((n, d))
    design = gaussian @ factor.T
    if scaled:
        design /= math.sqrt(d)
    return design


def sample_theta0(d: int, theta_prior_var: float, seed: SeedSpec) -> np.ndarray:
    """采样真实参数 θ0 ~ N(0, S²I)，S² = 0 时返回零向量"""
    if theta_prior_var < 0:
        raise DomainError(f"theta_prior_var 必须非负: {theta_prior_var}")
    if theta_prior_var == 0:
        return np.zeros(d)
    return math.sqrt(theta_prior_var) * seed.generator(StreamPurpose.THETA).standard_normal(d)


def sample_targets(
    design: np.ndarray,
    theta0: np.ndarray,
    sigma0_sq: float,
    seed: SeedSpec,
    noiseless: bool = False
) -> np.ndarray:
    """
    生成目标值 t = Zθ0 + ε，ε ~ N(0, σ0²I)

    Args:
        noiseless: 为 True 时 ε ≡ 0（σ0² → 0 的精确极限）

    Raises:
        ShapeError: 维度不一致
    """
    if design.ndim != 2 or theta0.ndim != 1 or design.shape[1] != theta0.shape[0]:
        raise ShapeError(f"设计矩阵 {design.shape} 与 theta0 {theta0.shape} 维度不一致")
    if not sigma0_sq > 0:
        raise DomainError(f"sigma0_sq 必须为正: {sigma0_sq}")

    signal = design @ theta0
    if noiseless:
        return signal
    noise = seed.generator(StreamPurpose.NOISE).standard_normal(design.shape[0])
    return signal + math.sqrt(sigma0_sq) * noise


def sample_instance(
    n: int,
    d: int,
    sigma_pop: np.ndarray,
    sigma0_sq: float,
    theta_prior_var: float,
    seed: SeedSpec,
    scaled: bool = True,
    theta0: Optional[np.ndarray] = None,
    noiseless: bool = False,
    design: Optional[np.ndarray] = None
) -> RegressionInstance:
    """
    按用途拆分的子流生成一个完整的回归实例

    Args:
        theta0: 给定时不再采样真实参数
        design: 给定时不再采样设计矩阵（固定设计的系综）
    """
    if theta0 is None:
        theta0 = sample_theta0(d, theta_prior_var, seed)
    if design is None:
        design = sample_design(n, d, sigma_pop, scaled, seed)
    targets = sample_targets(design, np.asarray(theta0, dtype=float), sigma0_sq, seed, noiseless)
    return RegressionInstance(design, targets, theta0, sigma0_sq, scaled)
