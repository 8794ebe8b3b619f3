"""
Σ = I 时 ML 自由能密度的渐近闭式

β ≥ ζ:
    f_β = (1/2β)[(β−ζ)·log(2πσ0²(1−ζ)) − (β−ζ)log(β−ζ)] + (log β + 1)/2
          − (1/2β)[ζ log ζ + (1−ζ)log(1−ζ) + 2ζ]
（约定 0·log 0 = 0）；β < ζ 时自由能密度为 −∞，在 T = 1/ζ 处发生零阶相变。
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple, Union

from scipy.special import xlogy

from ..core.exceptions import DomainError, TemperatureOutOfRange
from ..core.model import DivergentFlag


@dataclass(frozen=True)
class FreeEnergyCurvePoint:
    """自由能曲线上的一点"""
    temperature: float
    zeta: float
    value: Union[float, DivergentFlag]

    @property
    def divergent(self) -> bool:
        return self.value is DivergentFlag.DIVERGENT


def _check(zeta: float, sigma0_sq: float) -> None:
    if not 0 < zeta < 1:
        raise DomainError(f"zeta 必须位于 (0,1): {zeta}")
    if not sigma0_sq > 0:
        raise DomainError(f"sigma0_sq 必须为正: {sigma0_sq}")


def asymptotic_ml_fe(zeta: float, beta: float, sigma0_sq: float) -> Union[float, DivergentFlag]:
    """渐近 ML 自由能密度 f_β；β < ζ 返回 DivergentFlag"""
    _check(zeta, sigma0_sq)
    if math.isinf(beta):
        return ml_fe_limits(zeta, sigma0_sq)[0]
    if not beta > 0:
        raise DomainError(f"beta 必须为正: {beta}")
    if beta < zeta:
        return DivergentFlag.DIVERGENT

    gap = beta - zeta
    return (
        (gap * math.log(2.0 * math.pi * sigma0_sq * (1.0 - zeta)) - float(xlogy(gap, gap))) / (2.0 * beta)
        + 0.5 * (math.log(beta) + 1.0)
        - (float(xlogy(zeta, zeta)) + float(xlogy(1.0 - zeta, 1.0 - zeta)) + 2.0 * zeta) / (2.0 * beta)
    )


def asymptotic_sigma_sq(zeta: float, beta: float, sigma0_sq: float) -> float:
    """
    使渐近括号最小的 σ² = βσ0²(1−ζ)/(β−ζ)，β = +inf 时为 σ0²(1−ζ)

    Raises:
        TemperatureOutOfRange: β ≤ ζ
    """
    _check(zeta, sigma0_sq)
    if math.isinf(beta):
        return sigma0_sq * (1.0 - zeta)
    if not beta > zeta:
        raise TemperatureOutOfRange(f"要求 beta > zeta: beta={beta}, zeta={zeta}")
    return beta * sigma0_sq * (1.0 - zeta) / (beta - zeta)


def ml_fe_limits(zeta: float, sigma0_sq: float) -> Tuple[float, float]:
    """
    两个端点极限

    Returns:
        (β → ∞ 的 ½log(2πeσ0²(1−ζ)), β → ζ⁺ 的 (1/2ζ)[ζlog(1−ζ) − log(1−ζ) − ζ])
    """
    _check(zeta, sigma0_sq)
    high = 0.5 * math.log(2.0 * math.pi * math.e * sigma0_sq * (1.0 - zeta))
    log_rest = math.log1p(-zeta)
    critical = (zeta * log_rest - log_rest - zeta) / (2.0 * zeta)
    return high, critical


def fe_curve(
    zeta_list: Iterable[float],
    temperature_grid: Iterable[float],
    sigma0_sq: float,
    include_critical: bool = False
) -> List[FreeEnergyCurvePoint]:
    """
    各 ζ 在温度网格上的 f_β，T > 1/ζ 处为 DivergentFlag

    输出顺序与输入一致（先 ζ 后温度）；include_critical=True 时每个 ζ 追加临界温度 T = 1/ζ。
    """
    temperatures = [float(t) for t in temperature_grid]
    if any(not t > 0 for t in temperatures):
        raise DomainError("温度必须为正")

    points = []
    for zeta in zeta_list:
        zeta = float(zeta)
        grid = temperatures + ([1.0 / zeta] if include_critical else [])
        for temperature in grid:
            if temperature > 1.0 / zeta:
                value = DivergentFlag.DIVERGENT
            else:
                value = asymptotic_ml_fe(zeta, max(1.0 / temperature, zeta), sigma0_sq)
            points.append(FreeEnergyCurvePoint(temperature, zeta, value))
    return points
