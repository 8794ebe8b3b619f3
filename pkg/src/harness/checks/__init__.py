"""
校验模块
每个校验把一个解析结果与一个 Monte Carlo 聚合量配对
"""

from .base import BaseCheck, CheckName
from .check_factory import CheckFactory

__all__ = [
    'BaseCheck',
    'CheckName',
    'CheckFactory',
]
