"""
Marchenko–Pastur 密度

边界 a± = (1 ± √ζ)²。积分采用 λ = a− + (a+ − a−)·sin²u 代换，
消除端点处的平方根奇异性。
"""

import math
from typing import Tuple, Union

import numpy as np
from scipy import integrate, stats

from ..core.exceptions import DomainError, QuadratureError

QUAD_TOL = 1e-10

ArrayLike = Union[float, np.ndarray]


def _check_zeta(zeta: float) -> None:
    if not 0 < zeta < 1:
        raise DomainError(f"zeta 必须位于 (0,1): {zeta}")


def mp_edges(zeta: float) -> Tuple[float, float]:
    """支撑边界 (a−, a+)"""
    _check_zeta(zeta)
    root = math.sqrt(zeta)
    return (1.0 - root) ** 2, (1.0 + root) ** 2


def mp_pdf(lam: ArrayLike, zeta: float) -> ArrayLike:
    """ρ(λ) = √((λ−a−)(a+−λ)) / (2πζλ)，支撑外为 0"""
    lower, upper = mp_edges(zeta)
    lam_arr = np.asarray(lam, dtype=float)
    inside = (lam_arr > lower) & (lam_arr < upper)
    safe = np.where(inside, lam_arr, 1.0)
    density = np.where(
        inside,
        np.sqrt(np.clip((safe - lower) * (upper - safe), 0.0, None)) / (2.0 * math.pi * zeta * safe),
        0.0,
    )
    return float(density) if np.ndim(lam) == 0 else density


def substituted_weight(u: float, zeta: float) -> Tuple[float, float]:
    """
    代换后的 (λ(u), ρ(λ)dλ/du)

    u ∈ [0, π/2] 映射到 [a−, a+]。
    """
    lower, upper = mp_edges(zeta)
    width = upper - lower
    sin_u, cos_u = math.sin(u), math.cos(u)
    lam = lower + width * sin_u * sin_u
    weight = width * width * 2.0 * sin_u * sin_u * cos_u * cos_u / (2.0 * math.pi * zeta * lam)
    return lam, weight


def quad_checked(func, a: float, b: float, tol: float = QUAD_TOL, points=None) -> float:
    """
    scipy quad 的包装，误差估计超出容差时报错

    Raises:
        QuadratureError: 自适应积分未达到精度
    """
    result = integrate.quad(func, a, b, epsabs=tol, epsrel=tol, limit=200, points=points, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > 1e3 * tol * max(1.0, abs(value)):
        raise QuadratureError(f"数值积分未收敛: 误差估计 {abserr:.3e}, {result[3]}")
    if not math.isfinite(value):
        raise QuadratureError(f"数值积分结果非有限: {value}")
    return value


def mp_cdf(lam: ArrayLike, zeta: float) -> ArrayLike:
    """累积分布函数 ∫_{a−}^{λ} ρ，采用同一代换的自适应积分"""
    lower, upper = mp_edges(zeta)

    def single(x: float) -> float:
        if x <= lower:
            return 0.0
        if x >= upper:
            return 1.0
        u_max = math.asin(math.sqrt((x - lower) / (upper - lower)))
        return min(1.0, quad_checked(lambda u: substituted_weight(u, zeta)[1], 0.0, u_max))

    if np.ndim(lam) == 0:
        return single(float(lam))
    return np.array([single(float(x)) for x in np.asarray(lam, dtype=float)])


def mp_ks_distance(eigenvalues: np.ndarray, zeta: float) -> float:
    """经验特征值与 Marchenko–Pastur 分布之间的 KS 距离"""
    result = stats.kstest(np.asarray(eigenvalues, dtype=float), lambda x: mp_cdf(x, zeta))
    return float(result.statistic)
