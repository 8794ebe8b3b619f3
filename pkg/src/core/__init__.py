"""
核心模块：领域类型、异常、岭系统与序列化
"""

from .exceptions import (
    InputError,
    NumericalError,
    RidgeAnalysisError,
)
from .linalg import RidgeSystem
from .model import (
    DivergentFlag,
    FreeEnergyBreakdown,
    HyperParams,
    NoisePrior,
    NoisePriorKind,
    PopulationModel,
    RateFunctionEval,
    RegressionInstance,
    SpectralDensity,
    SpectrumKind,
)

__all__ = [
    "RidgeAnalysisError",
    "InputError",
    "NumericalError",
    "RidgeSystem",
    "DivergentFlag",
    "FreeEnergyBreakdown",
    "HyperParams",
    "NoisePrior",
    "NoisePriorKind",
    "PopulationModel",
    "RateFunctionEval",
    "RegressionInstance",
    "SpectralDensity",
    "SpectrumKind",
]
