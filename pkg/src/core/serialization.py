"""
模型对象与 JSON 字典之间的转换

数组转为嵌套的 Python float 列表（repr 往返精确），β = +inf 写作 "inf"，
DivergentFlag 写作 "divergent"。
"""

import hashlib
import json
import math
from typing import Any, Callable, Dict, Union

import numpy as np

from .exceptions import DataError
from .model import (
    DivergentFlag,
    FreeEnergyBreakdown,
    HyperParams,
    NoisePrior,
    NoisePriorKind,
    PopulationModel,
    RateFunctionEval,
    RegressionInstance,
    SpectralDensity,
    SpectrumKind,
)


def encode_float(value: Union[float, DivergentFlag, None]) -> Any:
    """浮点数编码，非有限值与发散标记转为字符串"""
    if value is None:
        return None
    if isinstance(value, DivergentFlag):
        return value.value
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def decode_float(value: Any) -> Union[float, DivergentFlag, None]:
    if value is None:
        return None
    if value == DivergentFlag.DIVERGENT.value:
        return DivergentFlag.DIVERGENT
    return float(value)


def _array(values: Any) -> Any:
    return None if values is None else np.asarray(values, dtype=float).tolist()


def _prior_to_dict(prior: NoisePrior) -> Dict[str, Any]:
    return {
        "kind": prior.kind.value,
        "sigma_sq_0": prior.sigma_sq_0,
        "shape": prior.shape,
        "rate": prior.rate,
    }


def _prior_from_dict(data: Dict[str, Any]) -> NoisePrior:
    return NoisePrior(
        NoisePriorKind(data.get("kind", "flat")),
        sigma_sq_0=data.get("sigma_sq_0"),
        shape=data.get("shape"),
        rate=data.get("rate"),
    )


_ENCODERS: Dict[type, Callable[[Any], Dict[str, Any]]] = {
    RegressionInstance: lambda x: {
        "design": _array(x.design),
        "targets": _array(x.targets),
        "theta0": _array(x.theta0),
        "sigma0_sq": x.sigma0_sq,
        "scaled": x.scaled,
    },
    HyperParams: lambda x: {
        "beta": encode_float(x.beta),
        "eta": x.eta,
        "noise_prior": _prior_to_dict(x.noise_prior),
    },
    NoisePrior: _prior_to_dict,
    PopulationModel: lambda x: {
        "sigma_pop": _array(x.sigma_pop),
        "theta_prior_var": x.theta_prior_var,
        "zeta": x.zeta,
    },
    SpectralDensity: lambda x: {
        "kind": x.kind.value,
        "samples": _array(x.samples),
        "zeta": x.zeta,
        "edges": _array(x.edges),
        "masses": _array(x.masses),
    },
    FreeEnergyBreakdown: lambda x: {
        "free_energy": x.free_energy,
        "avg_energy": x.avg_energy,
        "entropy": x.entropy,
        "temperature": x.temperature,
    },
    RateFunctionEval: lambda x: {
        "alpha": x.alpha,
        "saddle": x.saddle,
        "rate": x.rate,
        "valid_alpha_range": [encode_float(v) for v in x.valid_alpha_range],
        "branch": x.branch,
    },
}

_DECODERS: Dict[str, Callable[[Dict[str, Any]], Any]] = {
    "RegressionInstance": lambda d: RegressionInstance(
        np.array(d["design"], dtype=float),
        np.array(d["targets"], dtype=float),
        np.array(d["theta0"], dtype=float),
        d["sigma0_sq"],
        d.get("scaled", False),
    ),
    "HyperParams": lambda d: HyperParams(
        decode_float(d["beta"]),
        d.get("eta", 0.0),
        _prior_from_dict(d.get("noise_prior", {})),
    ),
    "NoisePrior": _prior_from_dict,
    "PopulationModel": lambda d: PopulationModel(
        np.array(d["sigma_pop"], dtype=float), d["theta_prior_var"], d["zeta"]
    ),
    "SpectralDensity": lambda d: SpectralDensity(
        SpectrumKind(d["kind"]),
        samples=d.get("samples"),
        zeta=d.get("zeta"),
        edges=d.get("edges"),
        masses=d.get("masses"),
    ),
    "FreeEnergyBreakdown": lambda d: FreeEnergyBreakdown(
        d["free_energy"], d["avg_energy"], d["entropy"], d["temperature"]
    ),
    "RateFunctionEval": lambda d: RateFunctionEval(
        d["alpha"],
        d["saddle"],
        d["rate"],
        tuple(decode_float(v) for v in d["valid_alpha_range"]),
        d.get("branch", "minus"),
    ),
}


def to_dict(obj: Any) -> Dict[str, Any]:
    """
    把模型对象转为带类型标签的 JSON 字典

    Raises:
        DataError: 不支持的类型
    """
    encoder = _ENCODERS.get(type(obj))
    if encoder is None:
        raise DataError(f"不支持序列化的类型: {type(obj).__name__}")
    payload = encoder(obj)
    payload["type"] = type(obj).__name__
    return payload


def from_dict(payload: Dict[str, Any]) -> Any:
    """
    由 to_dict 的输出重建模型对象

    Raises:
        DataError: 缺少或未知的类型标签
    """
    kind = payload.get("type")
    decoder = _DECODERS.get(kind)
    if decoder is None:
        raise DataError(f"未知的类型标签: {kind}，支持: {', '.join(sorted(_DECODERS))}")
    return decoder(payload)


def dumps(obj: Any) -> str:
    """JSON 文本（键排序、缩进 2）"""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def canonical_hash(obj: Any) -> str:
    """规范化 JSON（排序键、紧凑分隔符）的 SHA-256"""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
