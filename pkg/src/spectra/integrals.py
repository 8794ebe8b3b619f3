"""
谱积分 ∫ρ(λ)f(λ)dλ
"""

import math
from typing import Callable, Sequence

import numpy as np

from ..core.exceptions import IntegrandError
from ..core.model import SpectralDensity, SpectrumKind
from .marchenko_pastur import quad_checked, substituted_weight

SpectralFunction = Callable[[np.ndarray], np.ndarray]


def _finite(values: np.ndarray, where: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise IntegrandError(f"被积函数在{where}上取非有限值")
    return values


def spectral_integral(rho: SpectralDensity, f: SpectralFunction) -> float:
    """
    计算 ∫ρ(λ)f(λ)dλ

    经验样本取特征值上的平均；Marchenko–Pastur 用端点代换的自适应积分；
    直方图取中点求和。

    Args:
        rho: 谱密度
        f: 可作用于 numpy 数组的实函数

    Returns:
        float: 积分值

    Raises:
        IntegrandError: f 在支撑集上取非有限值
    """
    if rho.kind is SpectrumKind.SAMPLES:
        return float(np.mean(_finite(f(rho.samples), "特征值样本")))

    if rho.kind is SpectrumKind.HISTOGRAM:
        centers = 0.5 * (rho.edges[:-1] + rho.edges[1:])
        occupied = rho.masses > 0
        points = centers[occupied]
        values = np.broadcast_to(_finite(f(points), "直方图中点"), points.shape)
        return float(np.dot(rho.masses[occupied], values))

    def integrand(u: float) -> float:
        lam, weight = substituted_weight(u, rho.zeta)
        value = float(f(np.float64(lam)))
        if not math.isfinite(value):
            raise IntegrandError(f"被积函数在 λ={lam} 处取非有限值")
        return value * weight

    return quad_checked(integrand, 0.0, 0.5 * math.pi)


def empirical_density(eigenvalues: np.ndarray) -> SpectralDensity:
    """单个设计矩阵的经验谱密度"""
    return SpectralDensity.from_samples(eigenvalues)


def pooled_density(ensemble: Sequence[np.ndarray]) -> SpectralDensity:
    """系综平均谱密度：合并所有实现的特征值"""
    return SpectralDensity.from_samples(np.concatenate([np.asarray(e, dtype=float) for e in ensemble]))
