"""
实验配置

ExperimentConfig 是一次 Monte Carlo 实验的全部输入：规模、教师端与学生端参数、
种子、校验列表与输出。字典由 ConfigLoader 合并（环境变量 > 文件 > 默认值）后
经 from_dict 校验，未知字段一律报错。
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..core.exceptions import ConfigError
from ..core.model import HyperParams, NoisePrior, PopulationModel
from ..core.serialization import canonical_hash

logger = logging.getLogger(__name__)

SIGMA_POP_KINDS = ("identity", "diagonal", "dense")
PRIOR_KINDS = ("flat", "delta", "inverse_gamma")
DESIGN_MODES = ("fresh", "fixed")
OUTPUT_FORMATS = ("json", "csv")

# 各校验使用的常量，check_params 只能覆盖这里列出的键
CHECK_PARAM_DEFAULTS: Dict[str, Any] = {
    "mgf_alpha": 0.1,
    "mgf_rtol": 0.03,
    "cf_points": [0.1, 0.3],
    "cf_atol": 0.01,
    "tail_delta": 0.2,
    "ks_coordinate": 0,
    "ks_alpha": 0.01,
    "cov_rtol": 0.10,
    "noise_var_rtol": 0.15,
    "mse_var_rtol": 0.20,
    "ml_fe_var_rtol": 0.25,
    "map_fe_var_rtol": 0.35,
    "asymptotic_fe_atol": 2e-2,
    "helmholtz_tol": 1e-12,
    "identity_rtol": 1e-12,
    "mp_ks_tolerance": 0.05,
    "mse_delta_fraction": 0.25,
    "decay_sizes": [100, 400],
    "decay_factor": 3.0,
    "self_avg_sizes": [100, 400],
    "self_avg_factor": 2.0,
    "recursion_v0": None,
    "literal_cross_sign": False,
}


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _as_int(data: Mapping[str, Any], key: str) -> int:
    value = data[key]
    _require(isinstance(value, int) and not isinstance(value, bool), f"{key} 必须为整数: {value!r}")
    return value


def _as_float(data: Mapping[str, Any], key: str) -> float:
    value = data[key]
    if isinstance(value, str) and value.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), f"{key} 必须为数值: {value!r}")
    return float(value)


def _as_bool(data: Mapping[str, Any], key: str) -> bool:
    value = data[key]
    _require(isinstance(value, bool), f"{key} 必须为布尔值: {value!r}")
    return value


def _reject_unknown(data: Mapping[str, Any], allowed, where: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{where} 含未知字段: {', '.join(unknown)}。可用字段: {', '.join(sorted(allowed))}")


@dataclass(frozen=True)
class SigmaPopSpec:
    """总体协方差的描述：单位阵、对角线列表或稠密矩阵（内联或文件）"""
    kind: str = "identity"
    values: Optional[Tuple] = None
    path: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SigmaPopSpec":
        _require(isinstance(data, Mapping), f"sigma_pop 必须为对象: {data!r}")
        _reject_unknown(data, ("kind", "values", "path"), "sigma_pop")
        kind = data.get("kind", "identity")
        _require(kind in SIGMA_POP_KINDS, f"不支持的 sigma_pop 类型: {kind}。可用类型: {', '.join(SIGMA_POP_KINDS)}")
        values = data.get("values")
        path = data.get("path")
        if kind == "diagonal":
            _require(isinstance(values, list) and len(values) > 0, "diagonal 类型需要非空 values 列表")
            values = tuple(float(v) for v in values)
        elif kind == "dense":
            _require((values is None) != (path is None), "dense 类型需要 values 或 path 之一")
            if values is not None:
                values = tuple(tuple(float(v) for v in row) for row in values)
        else:
            _require(values is None and path is None, "identity 类型不接受 values/path")
        return cls(kind, values, path)

    def matrix(self, d: int) -> np.ndarray:
        """d×d 总体协方差"""
        if self.kind == "identity":
            return np.eye(d)
        if self.kind == "diagonal":
            _require(len(self.values) == d, f"diagonal 长度 {len(self.values)} 与 d={d} 不一致")
            return np.diag(np.asarray(self.values, dtype=float))
        if self.values is not None:
            matrix = np.asarray(self.values, dtype=float)
        else:
            source = Path(self.path)
            _require(source.exists(), f"协方差文件不存在: {source}")
            matrix = np.load(source) if source.suffix == ".npy" else np.loadtxt(source, delimiter=",", ndmin=2)
        _require(matrix.shape == (d, d), f"dense 协方差形状 {matrix.shape} 与 d={d} 不一致")
        return matrix

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"kind": self.kind}
        if self.values is not None:
            payload["values"] = [list(row) if isinstance(row, tuple) else row for row in self.values]
        if self.path is not None:
            payload["path"] = self.path
        return payload


def _prior_from_dict(data: Mapping[str, Any], sigma0_sq: float) -> NoisePrior:
    _require(isinstance(data, Mapping), f"prior 必须为对象: {data!r}")
    _reject_unknown(data, ("kind", "sigma_sq_0", "shape", "rate"), "prior")
    kind = data.get("kind", "flat")
    _require(kind in PRIOR_KINDS, f"不支持的先验类型: {kind}。可用类型: {', '.join(PRIOR_KINDS)}")
    try:
        if kind == "flat":
            return NoisePrior.flat()
        if kind == "delta":
            return NoisePrior.delta(float(data.get("sigma_sq_0", sigma0_sq)))
        return NoisePrior.inverse_gamma(float(data["shape"]), float(data["rate"]))
    except KeyError as e:
        raise ConfigError(f"inverse_gamma 先验缺少字段: {e}") from e
    except ValueError as e:
        raise ConfigError(f"先验参数无效: {e}") from e


def _prior_to_dict(prior: NoisePrior) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"kind": prior.kind.value}
    if prior.sigma_sq_0 is not None:
        payload["sigma_sq_0"] = prior.sigma_sq_0
    if prior.shape is not None:
        payload["shape"] = prior.shape
        payload["rate"] = prior.rate
    return payload


@dataclass(frozen=True)
class OutputSpec:
    """输出路径（None 表示标准输出）与格式"""
    path: Optional[str] = None
    format: str = "json"


@dataclass(frozen=True)
class ExperimentConfig:
    """一次实验的完整配置，构造后不可变"""
    n: int = 400
    d: int = 200
    trials: int = 2000
    sigma0_sq: float = 1.0
    theta_prior_var: float = 0.0
    theta0_value: float = 1.0
    eta: float = 0.0
    beta: float = 1.0
    sigma_sq: Optional[float] = None
    sigma_pop: SigmaPopSpec = field(default_factory=SigmaPopSpec)
    prior: NoisePrior = field(default_factory=NoisePrior.flat)
    master_seed: int = 20240101
    checks: Tuple[str, ...] = ("noise-mean", "noise-var", "helmholtz")
    output: OutputSpec = field(default_factory=OutputSpec)
    scaled: bool = True
    workers: int = 4
    z_threshold: float = 3.0
    failure_budget: int = 0
    kernel_bins: Optional[int] = None
    design_mode: str = "fresh"
    check_params: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in dataclasses.fields(cls)]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """
        校验并构造配置

        Args:
            data: 合并后的配置字典，缺省字段取默认值

        Returns:
            ExperimentConfig: 配置对象

        Raises:
            ConfigError: 未知字段、类型错误或取值越界
        """
        _require(isinstance(data, Mapping), f"配置必须为对象: {type(data).__name__}")
        _reject_unknown(data, cls.field_names(), "实验配置")
        merged = {**cls().to_dict(), **{k: v for k, v in data.items()}}

        n, d, trials = _as_int(merged, "n"), _as_int(merged, "d"), _as_int(merged, "trials")
        _require(n >= 1 and d >= 1, f"n 与 d 必须为正: n={n}, d={d}")
        _require(trials >= 1, f"trials 必须至少为 1: {trials}")

        sigma0_sq = _as_float(merged, "sigma0_sq")
        _require(math.isfinite(sigma0_sq) and sigma0_sq > 0, f"sigma0_sq 必须为正: {sigma0_sq}")
        theta_prior_var = _as_float(merged, "theta_prior_var")
        _require(theta_prior_var >= 0, f"theta_prior_var 必须非负: {theta_prior_var}")
        eta = _as_float(merged, "eta")
        _require(math.isfinite(eta) and eta >= 0, f"eta 必须为非负有限数: {eta}")
        _require(eta > 0 or d < n, f"η = 0 时要求 d < n: d={d}, n={n}")
        beta = _as_float(merged, "beta")
        _require(beta > 0, f"beta 必须为正（允许 \"inf\"）: {beta}")

        sigma_sq = merged.get("sigma_sq")
        if sigma_sq is not None:
            sigma_sq = _as_float(merged, "sigma_sq")
            _require(math.isfinite(sigma_sq) and sigma_sq > 0, f"sigma_sq 必须为正: {sigma_sq}")

        master_seed = _as_int(merged, "master_seed")
        _require(0 <= master_seed < 2 ** 64, f"master_seed 必须为 64 位无符号整数: {master_seed}")
        workers = _as_int(merged, "workers")
        _require(workers >= 1, f"workers 必须至少为 1: {workers}")
        failure_budget = _as_int(merged, "failure_budget")
        _require(failure_budget >= 0, f"failure_budget 必须非负: {failure_budget}")
        z_threshold = _as_float(merged, "z_threshold")
        _require(z_threshold > 0, f"z_threshold 必须为正: {z_threshold}")

        kernel_bins = merged.get("kernel_bins")
        if kernel_bins is not None:
            kernel_bins = _as_int(merged, "kernel_bins")
            _require(kernel_bins >= 1, f"kernel_bins 必须为正: {kernel_bins}")

        design_mode = merged["design_mode"]
        _require(design_mode in DESIGN_MODES, f"不支持的 design_mode: {design_mode}。可用: {', '.join(DESIGN_MODES)}")

        checks = merged["checks"]
        if isinstance(checks, str):
            checks = [c.strip() for c in checks.split(",") if c.strip()]
        _require(isinstance(checks, (list, tuple)) and all(isinstance(c, str) for c in checks),
                 f"checks 必须为字符串列表: {checks!r}")

        output = merged["output"]
        _require(isinstance(output, Mapping), f"output 必须为对象: {output!r}")
        _reject_unknown(output, ("path", "format"), "output")
        output_format = output.get("format", "json")
        _require(output_format in OUTPUT_FORMATS, f"不支持的输出格式: {output_format}")

        check_params = merged["check_params"]
        _require(isinstance(check_params, Mapping), f"check_params 必须为对象: {check_params!r}")
        _reject_unknown(check_params, CHECK_PARAM_DEFAULTS, "check_params")

        return cls(
            n=n,
            d=d,
            trials=trials,
            sigma0_sq=sigma0_sq,
            theta_prior_var=theta_prior_var,
            theta0_value=_as_float(merged, "theta0_value"),
            eta=eta,
            beta=beta,
            sigma_sq=sigma_sq,
            sigma_pop=SigmaPopSpec.from_dict(merged["sigma_pop"]),
            prior=_prior_from_dict(merged["prior"], sigma0_sq),
            master_seed=master_seed,
            checks=tuple(checks),
            output=OutputSpec(output.get("path"), output_format),
            scaled=_as_bool(merged, "scaled"),
            workers=workers,
            z_threshold=z_threshold,
            failure_budget=failure_budget,
            kernel_bins=kernel_bins,
            design_mode=design_mode,
            check_params=dict(check_params),
        )

    def to_dict(self) -> Dict[str, Any]:
        """可 JSON 序列化的规范字典（β = +inf 写为 "inf"）"""
        return {
            "n": self.n,
            "d": self.d,
            "trials": self.trials,
            "sigma0_sq": self.sigma0_sq,
            "theta_prior_var": self.theta_prior_var,
            "theta0_value": self.theta0_value,
            "eta": self.eta,
            "beta": "inf" if math.isinf(self.beta) else self.beta,
            "sigma_sq": self.sigma_sq,
            "sigma_pop": self.sigma_pop.to_dict(),
            "prior": _prior_to_dict(self.prior),
            "master_seed": self.master_seed,
            "checks": list(self.checks),
            "output": {"path": self.output.path, "format": self.output.format},
            "scaled": self.scaled,
            "workers": self.workers,
            "z_threshold": self.z_threshold,
            "failure_budget": self.failure_budget,
            "kernel_bins": self.kernel_bins,
            "design_mode": self.design_mode,
            "check_params": dict(self.check_params),
        }

    def with_overrides(self, **changes: Any) -> "ExperimentConfig":
        """覆盖部分字段并重新校验"""
        payload = self.to_dict()
        payload.update(changes)
        return ExperimentConfig.from_dict(payload)

    @property
    def config_hash(self) -> str:
        """不含 workers 与输出位置的规范 JSON 哈希；二者不影响结果"""
        payload = self.to_dict()
        payload.pop("workers")
        payload.pop("output")
        return canonical_hash(payload)

    @property
    def zeta(self) -> float:
        return self.d / self.n

    @property
    def student_sigma_sq(self) -> float:
        """学生端固定的 σ²，缺省等于 σ0²"""
        return self.sigma0_sq if self.sigma_sq is None else self.sigma_sq

    @property
    def hyper_params(self) -> HyperParams:
        return HyperParams(self.beta, self.eta, self.prior)

    def param(self, name: str) -> Any:
        """校验常量，未在 check_params 中给出时取默认值"""
        return self.check_params.get(name, CHECK_PARAM_DEFAULTS[name])

    def sigma_matrix(self) -> np.ndarray:
        return self.sigma_pop.matrix(self.d)

    def population_model(self) -> PopulationModel:
        """
        Raises:
            ConfigError: Σ 非对称或非正定，或 ζ ∉ (0,1)
        """
        try:
            return PopulationModel(self.sigma_matrix(), self.theta_prior_var, self.zeta)
        except ValueError as e:
            raise ConfigError(f"总体模型无效: {e}") from e

    def sigma_pop_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.sigma_matrix())
