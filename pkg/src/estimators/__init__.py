"""
估计模块：点估计、Gibbs 条件分布、σ² 不动点与 MMSE
"""

from .point import (
    GaussianLaw,
    gibbs_conditional,
    map_estimate,
    ml_estimate,
    ml_noise_estimate,
    ml_noise_estimate_projector,
    ridge_objective,
)
from .sigma import (
    SigmaSolve,
    deterministic_sigma_fixed_point,
    deterministic_sigma_map,
    deterministic_sigma_map_variance,
    sigma_recursion_step,
    solve_sigma,
)
from .mmse import MMSEEstimate, mmse_estimate

__all__ = [
    "GaussianLaw",
    "map_estimate",
    "ml_estimate",
    "ml_noise_estimate",
    "ml_noise_estimate_projector",
    "ridge_objective",
    "gibbs_conditional",
    "SigmaSolve",
    "solve_sigma",
    "sigma_recursion_step",
    "deterministic_sigma_map",
    "deterministic_sigma_map_variance",
    "deterministic_sigma_fixed_point",
    "MMSEEstimate",
    "mmse_estimate",
]
