"""
实验配置加载

来源按优先级从低到高：默认值、配置文件（.json / .py）、环境变量（RIDGE_MC_ 前缀）。
嵌套字段（sigma_pop、prior、check_params、output）逐键深度合并；环境变量用双下划线
指向嵌套键，例如 RIDGE_MC_OUTPUT__PATH=report.json、RIDGE_MC_CHECK_PARAMS__MGF_ALPHA=0.2。
"""

import copy
import importlib.util
import json
import logging
import os
from pathlib import Path
from types import ModuleType
from typing import Any, Dict, Mapping, Optional

from ..core.exceptions import ConfigError

logger = logging.getLogger(__name__)

ENV_PREFIX = "RIDGE_MC_"
NESTED_SEPARATOR = "__"

# .py 配置里只收集这些类型的顶层变量
_PLAIN_TYPES = (bool, int, float, str, list, tuple, dict, type(None))


class ConfigLoader:
    """实验配置加载器"""

    @staticmethod
    def load_from_file(config_path: str) -> Dict[str, Any]:
        """
        读取单个配置文件

        Args:
            config_path: .json 文件，或定义了顶层变量的 .py 文件（变量名不区分大小写）

        Returns:
            Dict[str, Any]: 文件中的配置项

        Raises:
            ConfigError: 文件不存在、格式不支持、无法解析或顶层不是对象
        """
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"配置文件不存在: {path}")

        readers = {".json": ConfigLoader._read_json, ".py": ConfigLoader._read_python}
        reader = readers.get(path.suffix.lower())
        if reader is None:
            raise ConfigError(f"不支持的配置文件格式: {path.suffix}。可用格式: {', '.join(readers)}")

        try:
            config = reader(path)
        except (OSError, json.JSONDecodeError, SyntaxError, ImportError) as e:
            raise ConfigError(f"加载配置文件失败 {path}: {e}") from e

        if not isinstance(config, dict):
            raise ConfigError(f"配置文件顶层必须是对象: {path}")
        logger.debug(f"已读取配置文件 {path}: {sorted(config)}")
        return config

    @staticmethod
    def _read_json(path: Path) -> Any:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    @staticmethod
    def _read_python(path: Path) -> Dict[str, Any]:
        spec = importlib.util.spec_from_file_location(f"_ridge_config_{path.stem}", path)
        if spec is None or spec.loader is None:
            raise ImportError(f"无法导入 {path}")
        module: ModuleType = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(module)
        return {
            name.lower(): value
            for name, value in vars(module).items()
            if not name.startswith("_") and isinstance(value, _PLAIN_TYPES)
        }

    @staticmethod
    def load_from_env(prefix: str = ENV_PREFIX, environ: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
        """
        收集带前缀的环境变量

        值能按 JSON 解析时取解析结果（"7" → 7，'["helmholtz"]' → 列表），否则保留字符串。
        键中的双下划线表示嵌套字段。

        Args:
            prefix: 环境变量前缀
            environ: 环境变量映射，默认 os.environ

        Returns:
            Dict[str, Any]: 可直接合并的嵌套配置
        """
        environ = os.environ if environ is None else environ
        config: Dict[str, Any] = {}
        for key, raw in environ.items():
            if not key.startswith(prefix) or len(key) == len(prefix):
                continue
            path = [part.lower() for part in key[len(prefix):].split(NESTED_SEPARATOR) if part]
            if not path:
                continue
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw

            node = config
            for part in path[:-1]:
                node = node.setdefault(part, {})
                if not isinstance(node, dict):
                    raise ConfigError(f"环境变量 {key} 与同名标量字段冲突")
            node[path[-1]] = value
            logger.debug(f"环境变量覆盖 {'.'.join(path)} = {value!r}")
        return config

    @staticmethod
    def merge_configs(*configs: Mapping[str, Any]) -> Dict[str, Any]:
        """
        深度合并：两边都是字典的键递归合并，其余情况后者覆盖前者

        Returns:
            Dict[str, Any]: 新字典，不修改输入
        """
        merged: Dict[str, Any] = {}
        for config in configs:
            for key, value in config.items():
                if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
                    merged[key] = ConfigLoader.merge_configs(merged[key], value)
                else:
                    merged[key] = copy.deepcopy(value)
        return merged

    @staticmethod
    def load_config(
        config_file: Optional[str] = None,
        use_env: bool = True,
        env_prefix: str = ENV_PREFIX
    ) -> Dict[str, Any]:
        """
        默认值 < 配置文件 < 环境变量

        Args:
            config_file: 配置文件路径，None 时只用默认值与环境变量
            use_env: 是否读取环境变量
            env_prefix: 环境变量前缀

        Returns:
            Dict[str, Any]: 尚未校验的配置字典，交给 ExperimentConfig.from_dict
        """
        layers = [get_default_config()]
        if config_file:
            layers.append(ConfigLoader.load_from_file(config_file))
        if use_env:
            layers.append(ConfigLoader.load_from_env(env_prefix))

        config = ConfigLoader.merge_configs(*layers)
        logger.info(f"配置加载完成: N={config.get('n')}, d={config.get('d')}, 试验次数={config.get('trials')}")
        return config


def get_default_config() -> Dict[str, Any]:
    """默认实验配置，每个 ExperimentConfig 字段一个键"""
    return {
        # 规模
        'n': 400,
        'd': 200,
        'trials': 2000,

        # 数据生成端
        'sigma0_sq': 1.0,
        'theta_prior_var': 0.0,
        'theta0_value': 1.0,
        'sigma_pop': {'kind': 'identity'},
        'scaled': True,
        'design_mode': 'fresh',

        # 推断端
        'eta': 0.0,
        'beta': 1.0,
        'sigma_sq': None,
        'prior': {'kind': 'flat'},

        # 运行控制
        'master_seed': 20240101,
        'workers': 4,
        'failure_budget': 0,

        # 校验
        'checks': ['noise-mean', 'noise-var', 'helmholtz'],
        'z_threshold': 3.0,
        'kernel_bins': None,
        'check_params': {},

        # 输出
        'output': {'path': None, 'format': 'json'},
    }
