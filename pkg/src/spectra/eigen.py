"""
样本协方差的特征值
"""

import logging

import numpy as np
from scipy import linalg

from ..core.exceptions import DataError, ShapeError

logger = logging.getLogger(__name__)

CLAMP_TOL = 1e-12


def sample_covariance(design: np.ndarray, scaled: bool) -> np.ndarray:
    """样本协方差 C = ZᵀZ/N（按原始尺度，缩放的设计矩阵乘回 d）"""
    n, d = design.shape
    return (design.T @ design) * (d / n if scaled else 1.0 / n)


def covariance_eigenvalues(design: np.ndarray, scaled: bool, raw_gram: bool = False) -> np.ndarray:
    """
    C = ZᵀZ/N 的特征值（升序）

    设计矩阵已按 1/√d 缩放时先还原为原始尺度，使特征值始终对应原始行的样本协方差。

    Args:
        design: N×d 设计矩阵
        scaled: 设计矩阵是否已除以 √d
        raw_gram: 为 True 时直接返回 ZᵀZ 的特征值（按存储形式）

    Returns:
        np.ndarray: 升序非负特征值

    Raises:
        DataError: 含非有限值
    """
    design = np.asarray(design, dtype=float)
    if design.ndim != 2:
        raise ShapeError(f"设计矩阵应为二维: {design.shape}")
    if not np.all(np.isfinite(design)):
        raise DataError("设计矩阵含有非有限值")

    n, d = design.shape
    gram = design.T @ design
    if not raw_gram:
        gram = gram * (d / n if scaled else 1.0 / n)

    eigs = linalg.eigh(gram, eigvals_only=True, check_finite=False)
    floor = -CLAMP_TOL * max(1.0, float(np.abs(eigs).max(initial=0.0)))
    negative = eigs < 0
    if np.any(eigs < floor):
        logger.warning(f"特征值 {eigs.min():.3e} 低于数值容差，已截断为 0")
    if np.any(negative):
        eigs = np.where(negative, 0.0, eigs)
    return np.sort(eigs)
