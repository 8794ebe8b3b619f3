"""
领域模型：回归实例、超参数、噪声先验、总体模型、谱密度及自由能分解。

所有类型构造后不可变，可在并发 worker 之间共享。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.special import gammaln

from .exceptions import DataError, DomainError, PriorError, ShapeError

SYMMETRY_TOL = 1e-12
MASS_TOL = 1e-10
HELMHOLTZ_TOL = 1e-10


def _frozen_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ShapeError(f"{name} 应为 {ndim} 维数组，实际为 {arr.ndim} 维")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} 含有非有限值")
    arr.setflags(write=False)
    return arr


class DivergentFlag(Enum):
    """自由能密度为 −∞ 的标记（β < ζ），区别于浮点 −inf"""
    DIVERGENT = "divergent"


@dataclass(frozen=True, eq=False)
class RegressionInstance:
    """一次数据生成：设计矩阵 Z、目标 t、真实参数 θ0 与噪声方差 σ0²"""
    design: np.ndarray
    targets: np.ndarray
    theta0: np.ndarray
    sigma0_sq: float
    # 设计矩阵元素是否已除以 √d（高维约定）
    scaled: bool = False

    def __post_init__(self) -> None:
        design = _frozen_array(self.design, "design", 2)
        targets = _frozen_array(self.targets, "targets", 1)
        theta0 = _frozen_array(self.theta0, "theta0", 1)
        if targets.shape[0] != design.shape[0]:
            raise ShapeError(
                f"targets 长度 {targets.shape[0]} 与设计矩阵行数 {design.shape[0]} 不一致"
            )
        if theta0.shape[0] != design.shape[1]:
            raise ShapeError(
                f"theta0 长度 {theta0.shape[0]} 与设计矩阵列数 {design.shape[1]} 不一致"
            )
        if not (math.isfinite(self.sigma0_sq) and self.sigma0_sq > 0):
            raise DomainError(f"sigma0_sq 必须为正有限数: {self.sigma0_sq}")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "theta0", theta0)
        object.__setattr__(self, "sigma0_sq", float(self.sigma0_sq))

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def d(self) -> int:
        return self.design.shape[1]

    @property
    def zeta(self) -> float:
        return self.d / self.n

    @property
    def noise(self) -> np.ndarray:
        """ε = t − Zθ0"""
        return self.targets - self.design @ self.theta0


class NoisePriorKind(Enum):
    """噪声方差先验类型"""
    FLAT = "flat"
    DELTA = "delta"
    INVERSE_GAMMA = "inverse_gamma"


@dataclass(frozen=True)
class NoisePrior:
    """
    噪声方差先验 P(σ²)

    Flat 为非正常先验（log P ≡ 0）；Delta 仅用于把 σ² 固定为 sigma_sq_0，
    其密度与导数从不被求值。
    """
    kind: NoisePriorKind = NoisePriorKind.FLAT
    sigma_sq_0: Optional[float] = None
    shape: Optional[float] = None
    rate: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind is NoisePriorKind.DELTA:
            if self.sigma_sq_0 is None or not self.sigma_sq_0 > 0:
                raise DomainError(f"Delta 先验需要正的 sigma_sq_0: {self.sigma_sq_0}")
        if self.kind is NoisePriorKind.INVERSE_GAMMA:
            if self.shape is None or self.rate is None or self.shape <= 0 or self.rate <= 0:
                raise DomainError(
                    f"InverseGamma 先验需要正的 shape/rate: shape={self.shape}, rate={self.rate}"
                )

    @classmethod
    def flat(cls) -> "NoisePrior":
        return cls(NoisePriorKind.FLAT)

    @classmethod
    def delta(cls, sigma_sq_0: float) -> "NoisePrior":
        return cls(NoisePriorKind.DELTA, sigma_sq_0=float(sigma_sq_0))

    @classmethod
    def inverse_gamma(cls, shape: float, rate: float) -> "NoisePrior":
        return cls(NoisePriorKind.INVERSE_GAMMA, shape=float(shape), rate=float(rate))

    @property
    def is_delta(self) -> bool:
        return self.kind is NoisePriorKind.DELTA

    def log_density(self, sigma_sq: float) -> float:
        """
        log P(σ²)

        Raises:
            PriorError: Delta 先验没有密度
        """
        if self.kind is NoisePriorKind.FLAT:
            return 0.0
        if self.kind is NoisePriorKind.INVERSE_GAMMA:
            a, b = self.shape, self.rate
            return a * math.log(b) - gammaln(a) - (a + 1.0) * math.log(sigma_sq) - b / sigma_sq
        raise PriorError("Delta 先验没有密度，只能用于固定 σ²")

    def log_density_derivative(self, sigma_sq: float) -> float:
        """
        ∂/∂σ² log P(σ²)

        Raises:
            PriorError: Delta 先验的导数不应被求值
        """
        if self.kind is NoisePriorKind.FLAT:
            return 0.0
        if self.kind is NoisePriorKind.INVERSE_GAMMA:
            return -(self.shape + 1.0) / sigma_sq + self.rate / sigma_sq ** 2
        raise PriorError("Delta 先验的导数不应被求值")


@dataclass(frozen=True)
class HyperParams:
    """逆温度 β（可为 +inf，即 MAP/ML 极限）、岭强度 η 与噪声先验"""
    beta: float
    eta: float = 0.0
    noise_prior: NoisePrior = field(default_factory=NoisePrior.flat)

    def __post_init__(self) -> None:
        if math.isnan(self.beta) or self.beta <= 0:
            raise DomainError(f"beta 必须为正（允许 +inf）: {self.beta}")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise DomainError(f"eta 必须为非负有限数: {self.eta}")

    @property
    def temperature(self) -> float:
        """T = 1/β，β = +inf 时为 0"""
        return 0.0 if math.isinf(self.beta) else 1.0 / self.beta

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta)


@dataclass(frozen=True, eq=False)
class PopulationModel:
    """总体协方差 Σ、随机真实参数方差 S² 与长宽比 ζ = d/N"""
    sigma_pop: np.ndarray
    theta_prior_var: float = 0.0
    zeta: float = 0.5

    def __post_init__(self) -> None:
        sigma_pop = _frozen_array(self.sigma_pop, "sigma_pop", 2)
        if sigma_pop.shape[0] != sigma_pop.shape[1]:
            raise ShapeError(f"sigma_pop 必须为方阵: {sigma_pop.shape}")
        if np.max(np.abs(sigma_pop - sigma_pop.T), initial=0.0) > SYMMETRY_TOL:
            raise DomainError("sigma_pop 不对称")
        if np.linalg.eigvalsh(sigma_pop)[0] <= 0:
            raise DomainError("sigma_pop 的特征值必须严格为正")
        if not self.theta_prior_var >= 0:
            raise DomainError(f"theta_prior_var 必须非负: {self.theta_prior_var}")
        if not 0 < self.zeta < 1:
            raise DomainError(f"zeta 必须位于 (0,1): {self.zeta}")
        object.__setattr__(self, "sigma_pop", sigma_pop)

    @classmethod
    def identity(cls, d: int, n: int, theta_prior_var: float = 0.0) -> "PopulationModel":
        return cls(np.eye(d), theta_prior_var, d / n)

    @property
    def d(self) -> int:
        return self.sigma_pop.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.sigma_pop)


class SpectrumKind(Enum):
    """谱密度的表示方式"""
    SAMPLES = "samples"
    MARCHENKO_PASTUR = "marchenko_pastur"
    HISTOGRAM = "histogram"


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """
    样本协方差 C = ZᵀZ/N 的特征值密度：经验样本、Marchenko–Pastur 解析式或直方图
    """
    kind: SpectrumKind
    samples: Optional[np.ndarray] = None
    zeta: Optional[float] = None
    edges: Optional[np.ndarray] = None
    masses: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.kind is SpectrumKind.SAMPLES:
            samples = np.sort(_frozen_array(self.samples, "samples", 1))
            if samples.size == 0:
                raise ShapeError("samples 不能为空")
            if samples[0] < 0:
                raise DomainError(f"特征值必须非负: {samples[0]}")
            samples.setflags(write=False)
            object.__setattr__(self, "samples", samples)
        elif self.kind is SpectrumKind.MARCHENKO_PASTUR:
            if self.zeta is None or not 0 < self.zeta < 1:
                raise DomainError(f"Marchenko–Pastur 密度需要 zeta ∈ (0,1): {self.zeta}")
        else:
            edges = _frozen_array(self.edges, "edges", 1)
            masses = _frozen_array(self.masses, "masses", 1)
            if edges.shape[0] != masses.shape[0] + 1:
                raise ShapeError("直方图边界数必须等于质量数加一")
            if np.any(np.diff(edges) <= 0):
                raise DomainError("直方图边界必须严格递增")
            if edges[0] < 0:
                raise DomainError("直方图支撑必须非负")
            if np.any(masses < 0) or abs(masses.sum() - 1.0) > MASS_TOL:
                raise DomainError(f"直方图质量之和必须为 1: {masses.sum()}")
            object.__setattr__(self, "edges", edges)
            object.__setattr__(self, "masses", masses)

    @classmethod
    def from_samples(cls, eigenvalues) -> "SpectralDensity":
        return cls(SpectrumKind.SAMPLES, samples=eigenvalues)

    @classmethod
    def marchenko_pastur(cls, zeta: float) -> "SpectralDensity":
        return cls(SpectrumKind.MARCHENKO_PASTUR, zeta=float(zeta))

    @classmethod
    def from_histogram(cls, edges, masses) -> "SpectralDensity":
        return cls(SpectrumKind.HISTOGRAM, edges=edges, masses=masses)

    def support(self) -> Tuple[float, float]:
        """支撑集（有质量部分）的下界与上界"""
        if self.kind is SpectrumKind.SAMPLES:
            return float(self.samples[0]), float(self.samples[-1])
        if self.kind is SpectrumKind.MARCHENKO_PASTUR:
            root = math.sqrt(self.zeta)
            return (1.0 - root) ** 2, (1.0 + root) ** 2
        occupied = np.nonzero(self.masses > 0)[0]
        return float(self.edges[occupied[0]]), float(self.edges[occupied[-1] + 1])


@dataclass(frozen=True)
class FreeEnergyBreakdown:
    """Helmholtz 分解 F = E − T·S"""
    free_energy: float
    avg_energy: float
    entropy: float
    temperature: float

    def __post_init__(self) -> None:
        values = (self.free_energy, self.avg_energy, self.entropy, self.temperature)
        if not all(math.isfinite(v) for v in values):
            raise DataError(f"自由能分解含非有限值: {values}")
        ts = self.temperature * self.entropy
        scale = max(1.0, abs(self.free_energy), abs(self.avg_energy), abs(ts))
        if abs(self.free_energy - (self.avg_energy - ts)) > HELMHOLTZ_TOL * scale:
            raise DomainError("自由能分解不满足 F = E − T·S")

    @property
    def helmholtz_defect(self) -> float:
        """|F − (E − T·S)| / max(1, |F|)"""
        gap = self.free_energy - (self.avg_energy - self.temperature * self.entropy)
        return abs(gap) / max(1.0, abs(self.free_energy))


@dataclass(frozen=True)
class RateFunctionEval:
    """MSE 偏差界的一个分支：鞍点 ω0、速率 Φ 以及 α 的有效区间"""
    alpha: float
    saddle: float
    rate: float
    valid_alpha_range: Tuple[float, float]
    branch: str = "minus"

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha 必须为正: {self.alpha}")
        if not math.isfinite(self.rate):
            raise DataError(f"速率函数取非有限值: {self.rate}")
