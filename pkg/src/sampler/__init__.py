"""
采样模块：种子与数据生成
"""

from .draws import sample_design, sample_instance, sample_targets, sample_theta0
from .rng import SeedSpec, StreamPurpose

__all__ = [
    "SeedSpec",
    "StreamPurpose",
    "sample_design",
    "sample_theta0",
    "sample_targets",
    "sample_instance",
]
