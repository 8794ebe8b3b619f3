"""
流式矩统计

每个块先精确计算均值与离差平方和矩阵，再按块编号顺序用 Chan 的并行公式合并。
合并树只由块编号决定，与 worker 数和完成顺序无关。
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from ..core.exceptions import ShapeError


@dataclass(frozen=True)
class StreamingMoments:
    """一组观测量的样本数、均值向量与离差平方和矩阵 M2"""
    names: Tuple[str, ...]
    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def empty(cls, names: Sequence[str]) -> "StreamingMoments":
        k = len(names)
        return cls(tuple(names), 0, np.zeros(k), np.zeros((k, k)))

    @classmethod
    def from_block(cls, names: Sequence[str], rows: np.ndarray) -> "StreamingMoments":
        """
        一个块内的两遍精确统计

        Args:
            names: 列名
            rows: 形状 (块内试验数, 观测量数)
        """
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(names):
            raise ShapeError(f"块数据形状 {rows.shape} 与 {len(names)} 个观测量不一致")
        if rows.shape[0] == 0:
            return cls.empty(names)
        mean = rows.mean(axis=0)
        centered = rows - mean
        return cls(tuple(names), rows.shape[0], mean, centered.T @ centered)

    def merge(self, other: "StreamingMoments") -> "StreamingMoments":
        """合并两个不相交样本的统计量（self 在前）"""
        if self.names != other.names:
            raise ShapeError(f"观测量不一致: {self.names} 与 {other.names}")
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        total = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / total)
        m2 = self.m2 + other.m2 + np.outer(delta, delta) * (self.count * other.count / total)
        return StreamingMoments(self.names, total, mean, m2)

    @property
    def covariance(self) -> np.ndarray:
        """无偏样本协方差，样本数小于 2 时为 NaN"""
        if self.count < 2:
            return np.full_like(self.m2, np.nan)
        return self.m2 / (self.count - 1)

    @property
    def variance(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    @property
    def std_error(self) -> np.ndarray:
        """均值的标准误"""
        return np.sqrt(self.variance / max(self.count, 1))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"未记录的观测量: {name}。已记录: {', '.join(self.names)}") from None

    def summary(self) -> Dict[str, Dict[str, float]]:
        """各观测量的 count/mean/variance/std_error"""
        variance, std_error = self.variance, self.std_error
        return {
            name: {
                "count": self.count,
                "mean": float(self.mean[i]),
                "variance": float(variance[i]),
                "std_error": float(std_error[i]),
            }
            for i, name in enumerate(self.names)
        }


def merge_in_order(parts: Sequence[StreamingMoments], names: Sequence[str]) -> StreamingMoments:
    """按给定顺序依次合并"""
    merged = StreamingMoments.empty(names)
    for part in parts:
        merged = merged.merge(part)
    return merged
