"""
解析模块：估计量分布、噪声估计量的矩母函数/特征函数/尾界、MSE 统计与速率函数
"""

from .laws import (
    map_conditional_gaussian,
    ml_estimator_covariance,
    student_t_logpdf,
    student_t_marginal,
    student_t_scale_matrix,
)
from .noise import (
    TailBound,
    noise_cf,
    noise_log_mgf,
    noise_mgf,
    noise_moments,
    noise_tail_bound,
    noise_tail_exponent,
)
from .mse import (
    MseDeviationBound,
    gamma_density,
    mse_cf,
    mse_deviation_bound,
    mse_mean_var,
    mse_rate_functions,
    mse_rate_minus,
    mse_rate_plus,
    mse_second_moment,
    mu_of,
)

__all__ = [
    "student_t_logpdf",
    "student_t_scale_matrix",
    "student_t_marginal",
    "ml_estimator_covariance",
    "map_conditional_gaussian",
    "TailBound",
    "noise_moments",
    "noise_mgf",
    "noise_log_mgf",
    "noise_cf",
    "noise_tail_exponent",
    "noise_tail_bound",
    "MseDeviationBound",
    "gamma_density",
    "mse_mean_var",
    "mse_second_moment",
    "mse_cf",
    "mu_of",
    "mse_rate_minus",
    "mse_rate_plus",
    "mse_rate_functions",
    "mse_deviation_bound",
]
