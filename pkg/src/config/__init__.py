"""
配置模块
"""

from .config_loader import ConfigLoader, get_default_config

__all__ = [
    'ConfigLoader',
    'get_default_config',
]
