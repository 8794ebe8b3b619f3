"""
谱密度相关核 C_d(λ, λ̃) = ⟨ρρ̃⟩ − ⟨ρ⟩⟨ρ̃⟩ 的系综估计
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..core.exceptions import EnsembleTooSmall, IntegrandError, ShapeError

logger = logging.getLogger(__name__)

MIN_ENSEMBLE = 30
MAX_BINS = 64


@dataclass(frozen=True, eq=False)
class CorrelationKernel:
    """分箱后的相关核：网格为箱中心，矩阵为各箱密度的系综协方差"""
    grid: np.ndarray
    widths: np.ndarray
    matrix: np.ndarray
    ensemble_size: int

    def __post_init__(self) -> None:
        k = self.grid.shape[0]
        if self.widths.shape != (k,) or self.matrix.shape != (k, k):
            raise ShapeError(f"核矩阵 {self.matrix.shape} 与网格长度 {k} 不一致")

    @classmethod
    def zeros(cls, grid: np.ndarray, widths: np.ndarray) -> "CorrelationKernel":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(widths, dtype=float), np.zeros((grid.size, grid.size)), 0)

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def _bin_edges(pooled: np.ndarray, bins: Optional[int]) -> np.ndarray:
    if bins is None:
        edges = np.histogram_bin_edges(pooled, bins="fd")
        if edges.size - 1 <= MAX_BINS:
            return edges
        bins = MAX_BINS
    return np.histogram_bin_edges(pooled, bins=bins)


def estimate_correlation_kernel(
    ensemble: Sequence[np.ndarray],
    bins: Optional[int] = None
) -> CorrelationKernel:
    """
    由特征值系综估计相关核

    所有实现共用由合并样本确定的分箱（Freedman–Diaconis，最多 64 箱），
    每个实现的箱密度为 计数/(d·箱宽)，核为箱密度的系综协方差。

    Args:
        ensemble: 每个设计矩阵的特征值列表
        bins: 指定箱数，None 时自动确定

    Raises:
        EnsembleTooSmall: 系综少于 30 个实现
    """
    if len(ensemble) < MIN_ENSEMBLE:
        raise EnsembleTooSmall(f"相关核至少需要 {MIN_ENSEMBLE} 个实现，实际 {len(ensemble)} 个")

    arrays = [np.asarray(e, dtype=float) for e in ensemble]
    edges = _bin_edges(np.concatenate(arrays), bins)
    widths = np.diff(edges)

    densities = np.empty((len(arrays), widths.size))
    for row, eigs in enumerate(arrays):
        counts, _ = np.histogram(eigs, bins=edges)
        densities[row] = counts / (eigs.size * widths)

    matrix = np.atleast_2d(np.cov(densities, rowvar=False, ddof=1))
    matrix = 0.5 * (matrix + matrix.T)
    logger.debug(f"相关核估计完成: {widths.size} 个箱, {len(arrays)} 个实现")
    return CorrelationKernel(0.5 * (edges[:-1] + edges[1:]), widths, matrix, len(arrays))


def kernel_surface_integral(
    kernel: CorrelationKernel,
    phi: Callable[[np.ndarray, np.ndarray], np.ndarray]
) -> float:
    """∫∫C_d(λ,λ̃)Φ(λ,λ̃)dλdλ̃ = Σ C_ij Φ(λ_i,λ_j) w_i w_j"""
    lam, lam_t = np.meshgrid(kernel.grid, kernel.grid, indexing="ij")
    values = np.asarray(phi(lam, lam_t), dtype=float)
    if not np.all(np.isfinite(values)):
        raise IntegrandError("核被积函数在网格上取非有限值")
    weights = np.outer(kernel.widths, kernel.widths)
    return float(np.sum(kernel.matrix * values * weights))


def kernel_double_integral(
    kernel: CorrelationKernel,
    f: Callable[[np.ndarray], np.ndarray],
    g: Optional[Callable[[np.ndarray], np.ndarray]] = None
) -> float:
    """可分离核 ∫∫C_d f(λ) g(λ̃)，g 缺省时取 f"""
    fv = np.asarray(f(kernel.grid), dtype=float)
    gv = fv if g is None else np.asarray(g(kernel.grid), dtype=float)
    if not (np.all(np.isfinite(fv)) and np.all(np.isfinite(gv))):
        raise IntegrandError("核被积函数在网格上取非有限值")
    return float((fv * kernel.widths) @ kernel.matrix @ (gv * kernel.widths))
