"""
噪声估计量 σ̂²_ML 的分布

Nσ̂²_ML/σ0² 服从 χ²_{N−d}：矩母函数 E[exp(αNσ̂²/2)] = exp(−(N/2)(1−ζ)log(1−ασ0²))，
与 Z 无关。
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.exceptions import AlphaOutOfRange, DeltaOutOfRange, DomainError, MGFPole


@dataclass(frozen=True)
class TailBound:
    """双侧偏差界 P(|σ̂² − σ0²(1−ζ)| ≥ δ) ≤ bound"""
    delta: float
    bound: float
    lower_rate: float
    upper_rate: float
    lower_alpha: float
    upper_alpha: float


def noise_moments(n: int, zeta: float, sigma0_sq: float) -> Tuple[float, float]:
    """σ̂²_ML 的精确均值 σ0²(1−ζ) 与方差 2σ0⁴(1−ζ)/N"""
    return sigma0_sq * (1.0 - zeta), 2.0 * sigma0_sq ** 2 * (1.0 - zeta) / n


def noise_log_mgf(alpha: float, n: int, zeta: float, sigma0_sq: float) -> float:
    """
    log E[exp(α‖t − Zθ̂_ML‖²/2)]

    Raises:
        MGFPole: α ≥ 1/σ0²
    """
    if alpha * sigma0_sq >= 1.0:
        raise MGFPole(f"矩母函数在 α ≥ 1/σ0² 处发散: alpha={alpha}, sigma0_sq={sigma0_sq}")
    return -0.5 * n * (1.0 - zeta) * math.log1p(-alpha * sigma0_sq)


def noise_mgf(alpha: float, n: int, zeta: float, sigma0_sq: float) -> float:
    """矩母函数，对数空间计算"""
    return math.exp(noise_log_mgf(alpha, n, zeta, sigma0_sq))


def noise_cf(a: float, n: int, zeta: float, sigma0_sq: float) -> complex:
    """特征函数 (1 − 2iaσ0²)^{−N(1−ζ)/2}，取主支"""
    return complex(np.exp(-0.5 * n * (1.0 - zeta) * np.log(1.0 - 2j * a * sigma0_sq)))


def noise_tail_exponent(
    delta: float,
    alpha: float,
    n: int,
    zeta: float,
    sigma0_sq: float,
    upper: bool
) -> float:
    """
    给定 α 的 Chernoff 速率，单侧界为 exp(−N·rate/2)

    上尾: (1−ζ)log(1 − ασ0²) + α(m + δ)；下尾: (1−ζ)log(1 + ασ0²) − α(m − δ)，m = σ0²(1−ζ)。

    Raises:
        AlphaOutOfRange: α ≤ 0，或上尾 α ≥ 1/σ0²
    """
    if not alpha > 0:
        raise AlphaOutOfRange(f"alpha 必须为正: {alpha}")
    mean = sigma0_sq * (1.0 - zeta)
    if upper:
        if alpha * sigma0_sq >= 1.0:
            raise AlphaOutOfRange(f"上尾要求 α < 1/σ0²: alpha={alpha}")
        return (1.0 - zeta) * math.log1p(-alpha * sigma0_sq) + alpha * (mean + delta)
    return (1.0 - zeta) * math.log1p(alpha * sigma0_sq) - alpha * (mean - delta)


def noise_tail_bound(delta: float, n: int, zeta: float, sigma0_sq: float) -> TailBound:
    """
    最优 α 下的双侧尾界，和上限截断为 2

    最优值 α = δ/(σ0²(m ± δ))，速率
    (1−ζ)log((1−ζ)/((1−ζ) ∓ δ/σ0²)) ± δ/σ0²。

    Raises:
        DeltaOutOfRange: δ ∉ (0, σ0²(1−ζ))
    """
    if not 0 < zeta < 1 or not sigma0_sq > 0:
        raise DomainError(f"参数无效: zeta={zeta}, sigma0_sq={sigma0_sq}")
    mean = sigma0_sq * (1.0 - zeta)
    if not 0 < delta < mean:
        raise DeltaOutOfRange(f"delta 必须位于 (0, {mean}): {delta}")

    ratio = delta / sigma0_sq
    rest = 1.0 - zeta
    lower_rate = rest * math.log(rest / (rest - ratio)) - ratio
    upper_rate = rest * math.log(rest / (rest + ratio)) + ratio
    bound = math.exp(-0.5 * n * lower_rate) + math.exp(-0.5 * n * upper_rate)
    return TailBound(
        delta=delta,
        bound=min(bound, 2.0),
        lower_rate=lower_rate,
        upper_rate=upper_rate,
        lower_alpha=delta / (sigma0_sq * (mean - delta)),
        upper_alpha=delta / (sigma0_sq * (mean + delta)),
    )
