"""
Monte Carlo 校验模块
实验配置、试验运行、聚合、校验注册、报告与文件输出
"""

from .aggregate import StreamingMoments, merge_in_order
from .checks import BaseCheck, CheckFactory, CheckName
from .compare import compare_report
from .emit import (
    bounds_frame,
    emit_fe_curve,
    fe_curve_frame,
    spectrum_frame,
    temperature_grid,
    write_csv,
    write_json,
)
from .experiment_config import CHECK_PARAM_DEFAULTS, ExperimentConfig, OutputSpec, SigmaPopSpec
from .report import AnalyticReport, Verdict
from .trials import TrialStatistics, run_trials

__all__ = [
    'StreamingMoments',
    'merge_in_order',
    'BaseCheck',
    'CheckFactory',
    'CheckName',
    'compare_report',
    'bounds_frame',
    'emit_fe_curve',
    'fe_curve_frame',
    'spectrum_frame',
    'temperature_grid',
    'write_csv',
    'write_json',
    'CHECK_PARAM_DEFAULTS',
    'ExperimentConfig',
    'OutputSpec',
    'SigmaPopSpec',
    'AnalyticReport',
    'Verdict',
    'TrialStatistics',
    'run_trials',
]
