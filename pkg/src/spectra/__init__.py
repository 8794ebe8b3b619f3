"""
谱模块：特征值、Marchenko–Pastur 密度、谱积分与相关核
"""

from .eigen import covariance_eigenvalues, sample_covariance
from .integrals import empirical_density, pooled_density, spectral_integral
from .kernel import (
    CorrelationKernel,
    estimate_correlation_kernel,
    kernel_double_integral,
    kernel_surface_integral,
)
from .marchenko_pastur import mp_cdf, mp_edges, mp_ks_distance, mp_pdf

__all__ = [
    "covariance_eigenvalues",
    "sample_covariance",
    "mp_edges",
    "mp_pdf",
    "mp_cdf",
    "mp_ks_distance",
    "spectral_integral",
    "empirical_density",
    "pooled_density",
    "CorrelationKernel",
    "estimate_correlation_kernel",
    "kernel_double_integral",
    "kernel_surface_integral",
]
