"""
自由能模块：条件/全自由能、平均与方差、渐近闭式与自由能曲线
"""

from .conditional import conditional_free_energy, conditional_free_energy_value, free_energy_bracket
from .marginal import marginal_sigma_density
from .full import full_free_energy, minimize_free_energy_bracket
from .averages import (
    map_avg_fe_density,
    map_fe_density_variance,
    map_variance_kernel,
    ml_avg_fe_density,
    ml_energy_variance,
    ml_entropy_variance,
    ml_fe_density_variance,
    ml_variance_kernel,
)
from .asymptotic import (
    FreeEnergyCurvePoint,
    asymptotic_ml_fe,
    asymptotic_sigma_sq,
    fe_curve,
    ml_fe_limits,
)

__all__ = [
    "conditional_free_energy",
    "conditional_free_energy_value",
    "free_energy_bracket",
    "marginal_sigma_density",
    "full_free_energy",
    "minimize_free_energy_bracket",
    "ml_avg_fe_density",
    "ml_energy_variance",
    "ml_entropy_variance",
    "ml_fe_density_variance",
    "ml_variance_kernel",
    "map_avg_fe_density",
    "map_fe_density_variance",
    "map_variance_kernel",
    "FreeEnergyCurvePoint",
    "asymptotic_ml_fe",
    "asymptotic_sigma_sq",
    "ml_fe_limits",
    "fe_curve",
]
