"""
岭回归线性系统

J_{σ²η} = ZᵀZ + σ²η·I 的 Cholesky 分解，提供求解、对数行列式与迹运算。
任何地方都不显式构造逆矩阵。
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg

from .exceptions import SingularSystem

logger = logging.getLogger(__name__)

# 主元比（最小/最大）低于该值即视为奇异
PIVOT_RATIO_TOL = 1e-13


class RidgeSystem:
    """
    岭系统 J + shift·I 的 Cholesky 分解

    Args:
        design: 设计矩阵 Z（N×d，按存储形式使用）
        shift: 对角平移 σ²η，必须非负
        gram: 可选的预先计算的 ZᵀZ，避免重复计算

    Raises:
        SingularSystem: 矩阵非正定或主元比过小
    """

    def __init__(self, design: np.ndarray, shift: float = 0.0, gram: Optional[np.ndarray] = None):
        self.design = design
        self.shift = float(shift)
        self.gram = design.T @ design if gram is None else gram
        matrix = self.gram + self.shift * np.eye(self.gram.shape[0])
        try:
            self._factor = linalg.cho_factor(matrix, lower=True, check_finite=False)
        except linalg.LinAlgError as e:
            raise SingularSystem(f"岭系统非正定 (shift={self.shift}): {e}") from e

        pivots = np.diag(self._factor[0])
        ratio = pivots.min() / pivots.max()
        if not ratio ** 2 > PIVOT_RATIO_TOL:
            raise SingularSystem(f"岭系统接近奇异，主元比平方为 {ratio ** 2:.3e} (shift={self.shift})")
        self._log_pivots = np.log(pivots)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """求解 (J + shift·I) x = rhs"""
        return linalg.cho_solve(self._factor, rhs, check_finite=False)

    def estimate(self, targets: np.ndarray) -> np.ndarray:
        """θ̂ = (J + shift·I)⁻¹ Zᵀt"""
        return self.solve(self.design.T @ targets)

    def logdet(self) -> float:
        """log|J + shift·I| = 2·Σ log L_ii"""
        return 2.0 * float(np.sum(self._log_pivots))

    def trace_inverse(self) -> float:
        """Tr[(J + shift·I)⁻¹]"""
        return float(np.trace(self.solve(np.eye(self.dim))))

    def inverse(self) -> np.ndarray:
        """(J + shift·I)⁻¹，仅用于构造协方差矩阵"""
        inv = self.solve(np.eye(self.dim))
        return 0.5 * (inv + inv.T)

    def quadratic_form(self, targets: np.ndarray) -> float:
        """tᵀ(I − Z(J + shift·I)⁻¹Zᵀ)t"""
        projected = self.design.T @ targets
        return float(targets @ targets - projected @ self.solve(projected))
