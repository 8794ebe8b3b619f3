"""
结果输出：JSON 报告与 CSV 表格

JSON 键排序、缩进 2；CSV 浮点数用 %.17g 写出，往返精确。
"""

import json
import logging
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from ..analytics import mse_deviation_bound, noise_moments, noise_tail_bound
from ..core.exceptions import DomainError
from ..freenergy import fe_curve
from ..spectra import mp_pdf
from .experiment_config import ExperimentConfig
from .report import json_safe
from .trials import run_trials

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
FE_CURVE_COLUMNS = ["zeta", "temperature", "f_beta", "divergent"]
SPECTRUM_COLUMNS = ["lambda", "empirical_density", "mp_density"]
MAX_SPECTRUM_BINS = 200


def to_json(payload: Any) -> str:
    return json.dumps(json_safe(payload), sort_keys=True, indent=2, ensure_ascii=False)


def write_json(payload: Any, path: Optional[str] = None) -> str:
    """写出 JSON（path 为 None 时只返回文本）"""
    text = to_json(payload) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"已写出 JSON: {path}")
    return text


def write_csv(frame: pd.DataFrame, path: Optional[str] = None) -> str:
    """写出 CSV（path 为 None 时只返回文本）"""
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if path:
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"已写出 CSV: {path} ({len(frame)} 行)")
    return text


def temperature_grid(tmin: float, tmax: float, steps: int, spacing: str = "linear") -> np.ndarray:
    """
    温度网格

    Raises:
        DomainError: 区间或步数无效
    """
    if not 0 < tmin < tmax or steps < 2:
        raise DomainError(f"温度网格无效: tmin={tmin}, tmax={tmax}, steps={steps}")
    if spacing == "linear":
        return np.linspace(tmin, tmax, steps)
    if spacing == "log":
        return np.geomspace(tmin, tmax, steps)
    raise DomainError(f"不支持的网格类型: {spacing}。可用类型: linear, log")


def fe_curve_frame(zeta_list: Iterable[float], t_grid: Iterable[float], sigma0_sq: float) -> pd.DataFrame:
    """渐近 ML 自由能曲线，每个 ζ 含临界温度 T = 1/ζ 一行"""
    points = fe_curve(zeta_list, t_grid, sigma0_sq, include_critical=True)
    frame = pd.DataFrame(
        [
            {
                "zeta": p.zeta,
                "temperature": p.temperature,
                "f_beta": np.nan if p.divergent else p.value,
                "divergent": int(p.divergent),
            }
            for p in points
        ],
        columns=FE_CURVE_COLUMNS,
    )
    frame = frame.drop_duplicates(subset=["zeta", "temperature"], keep="first")
    return frame.sort_values(["zeta", "temperature"], kind="mergesort").reset_index(drop=True)


def emit_fe_curve(
    zeta_list: Sequence[float],
    t_grid: Sequence[float],
    sigma0_sq: float,
    path: Optional[str] = None
) -> pd.DataFrame:
    """
    写出自由能曲线 CSV（列 zeta,temperature,f_beta,divergent）

    发散行的 f_beta 为空，divergent 为 1。

    Returns:
        pd.DataFrame: 写出的表
    """
    frame = fe_curve_frame(zeta_list, t_grid, sigma0_sq)
    write_csv(frame, path)
    return frame


def spectrum_frame(config: ExperimentConfig) -> pd.DataFrame:
    """config.trials 个设计矩阵合并特征值的直方图密度与 MP 密度"""
    stats = run_trials(config, {"eigenvalues"})
    pooled = np.concatenate(stats.eigenvalues)
    edges = np.histogram_bin_edges(pooled, bins="fd")
    if edges.size - 1 > MAX_SPECTRUM_BINS:
        edges = np.histogram_bin_edges(pooled, bins=MAX_SPECTRUM_BINS)
    density, edges = np.histogram(pooled, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    mp = mp_pdf(centers, config.zeta) if config.zeta < 1 else np.full_like(centers, np.nan)
    return pd.DataFrame({"lambda": centers, "empirical_density": density, "mp_density": mp}, columns=SPECTRUM_COLUMNS)


def bounds_frame(kind: str, deltas: Sequence[float], config: ExperimentConfig) -> pd.DataFrame:
    """
    尾界与经验偏差频率

    Args:
        kind: "noise"（σ̂²_ML 的双侧 Chernoff 界）或 "mse"（指数阶 MSE 偏差界）
        deltas: 偏差 δ 列表
        config: 经验频率所用的实验配置

    Raises:
        DomainError: 未知的 kind
    """
    if kind not in ("noise", "mse"):
        raise DomainError(f"不支持的界类型: {kind}。可用类型: noise, mse")
    stats = run_trials(config, {"ml"})
    rows = []
    if kind == "noise":
        mean, _ = noise_moments(config.n, config.zeta, config.sigma0_sq)
        sigma_ml = stats.column("sigma_ml")
        for delta in deltas:
            tail = noise_tail_bound(delta, config.n, config.zeta, config.sigma0_sq)
            rows.append({
                "delta": delta,
                "bound": tail.bound,
                "lower_rate": tail.lower_rate,
                "upper_rate": tail.upper_rate,
                "empirical_frequency": float(np.mean(np.abs(sigma_ml - mean) >= delta)),
            })
        return pd.DataFrame(rows, columns=["delta", "bound", "lower_rate", "upper_rate", "empirical_frequency"])

    eigs = config.sigma_pop_eigenvalues()
    mse = stats.column("mse")
    for delta in deltas:
        bound = mse_deviation_bound(
            delta, 1e-3, config.n, config.d, config.sigma0_sq,
            float(eigs.min()), float(eigs.max()), config.zeta, optimize_alpha=True,
        )
        hits = (mse >= bound.mu_upper_tail + delta) | (mse <= bound.mu_lower_tail - delta)
        rows.append({
            "delta": delta,
            "bound": bound.bound,
            "rate_minus": bound.rate_minus,
            "rate_plus": bound.rate_plus,
            "empirical_frequency": float(hits.mean()),
        })
    return pd.DataFrame(rows, columns=["delta", "bound", "rate_minus", "rate_plus", "empirical_frequency"])
