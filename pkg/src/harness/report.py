"""
解析值与 Monte Carlo 估计的对照记录
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from ..core.serialization import encode_float


class Verdict(Enum):
    """校验结论"""
    PASS = "pass"
    FAIL = "fail"

    @classmethod
    def of(cls, passed: bool) -> "Verdict":
        return cls.PASS if passed else cls.FAIL


@dataclass
class AnalyticReport:
    """
    一个校验的结果

    统计型校验 verdict = pass 当且仅当 |z_score| ≤ 阈值；界、恒等式与容差型校验
    使用各自的判定规则，规则写在 metadata["rule"] 中。
    """
    check_name: str
    analytic: float
    empirical: float
    std_error: float
    z_score: float
    verdict: Verdict
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check_name": self.check_name,
            "analytic": encode_float(self.analytic),
            "empirical": encode_float(self.empirical),
            "std_error": encode_float(self.std_error),
            "z_score": encode_float(self.z_score),
            "verdict": self.verdict.value,
            "metadata": json_safe(self.metadata),
        }


def json_safe(value: Any) -> Any:
    """递归转换为严格 JSON 可表示的值（非有限浮点转为字符串）"""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "tolist"):
        return json_safe(value.tolist())
    if isinstance(value, complex):
        return {"real": encode_float(value.real), "imag": encode_float(value.imag)}
    return encode_float(value)


def z_score(analytic: float, empirical: float, std_error: float) -> float:
    """(经验值 − 解析值)/标准误；标准误为 0 时相等记 0，否则记 ±inf"""
    gap = empirical - analytic
    if std_error > 0 and math.isfinite(std_error):
        return gap / std_error
    if gap == 0:
        return 0.0
    return math.copysign(math.inf, gap)


def statistical_report(
    check_name: str,
    analytic: float,
    empirical: float,
    std_error: float,
    threshold: float,
    metadata: Optional[Dict[str, Any]] = None
) -> AnalyticReport:
    """|z| ≤ threshold 判定的报告"""
    z = z_score(analytic, empirical, std_error)
    meta = {"rule": f"|z| <= {threshold:g}"}
    meta.update(metadata or {})
    return AnalyticReport(check_name, analytic, empirical, std_error, z, Verdict.of(abs(z) <= threshold), meta)


def ruled_report(
    check_name: str,
    analytic: float,
    empirical: float,
    std_error: float,
    passed: bool,
    rule: str,
    metadata: Optional[Dict[str, Any]] = None,
    z: Optional[float] = None
) -> AnalyticReport:
    """使用专门规则（容差、界、恒等式）判定的报告；z_score 仅供参考，恒等式校验传入 z=0"""
    meta = {"rule": rule}
    meta.update(metadata or {})
    if z is None:
        z = z_score(analytic, empirical, std_error)
    return AnalyticReport(check_name, analytic, empirical, std_error, z, Verdict.of(passed), meta)
