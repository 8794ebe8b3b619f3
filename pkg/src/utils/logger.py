"""
日志配置模块

控制台日志写到 stderr，标准输出只留给 JSON/CSV 结果；文件日志按日期写到 logs/ 目录。
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def get_log_dir() -> Path:
    """
    获取日志目录路径，如果不存在则创建

    Returns:
        Path: 项目根目录下的 logs 目录
    """
    project_root = Path(__file__).parent.parent.parent
    log_dir = project_root / "logs"
    log_dir.mkdir(exist_ok=True)
    return log_dir


def get_default_log_file(name: Optional[str] = None) -> str:
    """
    获取默认日志文件路径：logs/YYYYMMDD_<name>.log，未指定名称时为 app

    Args:
        name: 日志记录器名称

    Returns:
        str: 日志文件路径
    """
    date_str = datetime.now().strftime('%Y%m%d')
    return str(get_log_dir() / f"{date_str}_{name or 'app'}.log")


def resolve_level(level: Union[int, str]) -> int:
    """
    把 "DEBUG"/"INFO" 等级别名转换为数值

    Raises:
        ValueError: 未知的级别名
    """
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).upper())
    if not isinstance(value, int):
        raise ValueError(f"未知的日志级别: {level}。可用级别: DEBUG, INFO, WARNING, ERROR")
    return value


def setup_logger(
    name: Optional[str] = None,
    level: Union[int, str] = logging.INFO,
    log_file: Optional[str] = None,
    enable_file_logging: bool = False
) -> logging.Logger:
    """
    配置日志记录器

    重复调用不会重复添加处理器，只更新级别。

    Args:
        name: 日志记录器名称，默认为根记录器
        level: 日志级别（数值或级别名）
        log_file: 日志文件路径，不指定则使用 logs 目录下的默认路径
        enable_file_logging: 是否启用文件日志

    Returns:
        logging.Logger: 配置好的日志记录器
    """
    level = resolve_level(level)
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(level)
        return logger

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if enable_file_logging:
        if log_file is None:
            log_file = get_default_log_file(name)
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        logger.info(f"日志文件已创建: {log_file}")

    return logger
