"""
测试配置加载、实验配置校验与日志配置
"""

import json
import logging
import math
import sys
from pathlib import Path

import pytest

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from src.config import ConfigLoader, get_default_config
from src.core.exceptions import ConfigError
from src.core.model import NoisePriorKind
from src.harness import ExperimentConfig
from src.utils.logger import resolve_level, setup_logger


def test_load_json_and_python_files(tmp_path):
    json_file = tmp_path / "exp.json"
    json_file.write_text(json.dumps({"n": 50, "d": 10}), encoding="utf-8")
    assert ConfigLoader.load_from_file(str(json_file)) == {"n": 50, "d": 10}

    py_file = tmp_path / "exp.py"
    py_file.write_text("N = 60\nTRIALS = 8\n_hidden = 1\n", encoding="utf-8")
    assert ConfigLoader.load_from_file(str(py_file)) == {"n": 60, "trials": 8}


def test_load_file_errors(tmp_path):
    """文件不存在、格式不支持、内容损坏与顶层非对象都报 ConfigError"""
    with pytest.raises(ConfigError):
        ConfigLoader.load_from_file(str(tmp_path / "missing.json"))
    yaml_file = tmp_path / "exp.yaml"
    yaml_file.write_text("n: 1", encoding="utf-8")
    with pytest.raises(ConfigError):
        ConfigLoader.load_from_file(str(yaml_file))
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        ConfigLoader.load_from_file(str(broken))
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        ConfigLoader.load_from_file(str(listing))


def test_priority_env_over_file(tmp_path, monkeypatch):
    """优先级: 环境变量 > 配置文件 > 默认值"""
    config_file = tmp_path / "exp.json"
    config_file.write_text(json.dumps({"trials": 11, "n": 80}), encoding="utf-8")
    monkeypatch.setenv("RIDGE_MC_TRIALS", "7")
    monkeypatch.setenv("RIDGE_MC_CHECKS", '["helmholtz"]')

    config = ConfigLoader.load_config(str(config_file))
    assert config["trials"] == 7
    assert config["n"] == 80
    assert config["checks"] == ["helmholtz"]
    assert config["d"] == get_default_config()["d"]


def test_defaults_build_valid_config():
    config = ExperimentConfig.from_dict(get_default_config())
    assert config.zeta == pytest.approx(0.5)
    assert config.student_sigma_sq == config.sigma0_sq
    assert config.prior.kind is NoisePriorKind.FLAT


def test_unknown_fields_rejected():
    """顶层、sigma_pop、prior 与 check_params 的未知字段都报错"""
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"trails": 10})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"sigma_pop": {"kind": "identity", "scale": 2}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"prior": {"kind": "flat", "a": 1}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"check_params": {"z": 1}})


def test_value_validation():
    """η = 0 时 d ≥ N、非正 β 与错误类型都报错"""
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"n": 10, "d": 10})
    assert ExperimentConfig.from_dict({"n": 10, "d": 20, "eta": 0.5}).d == 20
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"beta": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"trials": "many"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"design_mode": "shared"})


def test_beta_inf_and_checks_string():
    config = ExperimentConfig.from_dict({"beta": "inf", "checks": "noise-mean, mse-mean"})
    assert math.isinf(config.beta)
    assert config.checks == ("noise-mean", "mse-mean")
    assert config.to_dict()["beta"] == "inf"


def test_delta_prior_defaults_to_generating_noise():
    config = ExperimentConfig.from_dict({"sigma0_sq": 2.5, "prior": {"kind": "delta"}})
    assert config.prior.sigma_sq_0 == 2.5


def test_config_hash_ignores_workers_and_output():
    base = ExperimentConfig.from_dict({"workers": 1})
    assert base.config_hash == base.with_overrides(workers=8, output={"path": "x.json", "format": "json"}).config_hash
    assert base.config_hash != base.with_overrides(master_seed=1).config_hash


def test_sigma_pop_matrix(tmp_path):
    """对角与文件形式的总体协方差"""
    diagonal = ExperimentConfig.from_dict({"n": 10, "d": 3, "sigma_pop": {"kind": "diagonal", "values": [1, 2, 3]}})
    assert diagonal.sigma_pop_eigenvalues().tolist() == pytest.approx([1.0, 2.0, 3.0])

    matrix_file = tmp_path / "sigma.csv"
    matrix_file.write_text("2,0\n0,1\n", encoding="utf-8")
    dense = ExperimentConfig.from_dict({"n": 10, "d": 2, "sigma_pop": {"kind": "dense", "path": str(matrix_file)}})
    assert dense.sigma_matrix()[0, 0] == 2.0

    bad = ExperimentConfig.from_dict({"n": 10, "d": 2, "sigma_pop": {"kind": "dense", "values": [[1, 2], [2, 1]]}})
    with pytest.raises(ConfigError):
        bad.population_model()


def test_resolve_level_and_idempotent_setup():
    assert resolve_level("debug") == logging.DEBUG
    assert resolve_level(30) == 30
    with pytest.raises(ValueError):
        resolve_level("LOUD")

    logger = setup_logger("ridge-config-test", level="WARNING")
    count = len(logger.handlers)
    setup_logger("ridge-config-test", level="DEBUG")
    assert len(logger.handlers) == count
    assert logger.level == logging.DEBUG


def test_nested_env_keys_and_deep_merge(tmp_path):
    """双下划线指向嵌套字段，嵌套字典逐键合并"""
    env = {
        "RIDGE_MC_OUTPUT__PATH": "report.json",
        "RIDGE_MC_CHECK_PARAMS__MGF_ALPHA": "0.2",
        "OTHER_TRIALS": "5",
    }
    overrides = ConfigLoader.load_from_env(environ=env)
    assert overrides == {"output": {"path": "report.json"}, "check_params": {"mgf_alpha": 0.2}}

    file_layer = {"check_params": {"tail_delta": 0.1}, "output": {"format": "csv"}}
    merged = ConfigLoader.merge_configs(get_default_config(), file_layer, overrides)
    assert merged["output"] == {"path": "report.json", "format": "csv"}
    assert merged["check_params"] == {"tail_delta": 0.1, "mgf_alpha": 0.2}
    assert file_layer == {"check_params": {"tail_delta": 0.1}, "output": {"format": "csv"}}


def test_python_config_keeps_plain_values_only(tmp_path):
    py_file = tmp_path / "exp_plain.py"
    py_file.write_text("import math\nN = 30\nBETA = math.inf\ndef helper():\n    return 1\n", encoding="utf-8")
    assert ConfigLoader.load_from_file(str(py_file)) == {"n": 30, "beta": math.inf}
