"""
解析结果与 Monte Carlo 估计的批量对照
"""

import logging
from typing import List, Optional, Sequence

from .checks import CheckFactory
from .experiment_config import ExperimentConfig
from .report import AnalyticReport
from .trials import run_trials

logger = logging.getLogger(__name__)


def compare_report(config: ExperimentConfig, checks: Optional[Sequence[str]] = None) -> List[AnalyticReport]:
    """
    对每个请求的校验生成一份 AnalyticReport

    先检查所有校验是否适用，再以所需观测量分组的并集跑一次主系综。

    Args:
        config: 实验配置
        checks: 校验名称列表（可含 "all"），None 时使用 config.checks

    Returns:
        List[AnalyticReport]: 与请求顺序一致的报告

    Raises:
        UnsupportedCheck: 未知校验或配置不满足其前提
        TrialFailure: 主系综或派生系综失败试验过多
    """
    instances = CheckFactory.create_many(config.checks if checks is None else checks)
    for check in instances:
        check.validate(config)

    groups = frozenset().union(*(check.groups_for(config) for check in instances))
    stats = run_trials(config, groups) if groups else None

    reports = []
    for check in instances:
        report = check.evaluate(config, stats)
        report.metadata.update({
            "config_hash": config.config_hash,
            "master_seed": config.master_seed,
            "n": config.n,
            "d": config.d,
            "trials": config.trials,
        })
        logger.info(
            f"校验 {report.check_name}: {report.verdict.value} "
            f"(解析值={report.analytic:.6g}, 经验值={report.empirical:.6g}, z={report.z_score:.3g})"
        )
        reports.append(report)

    failed = [r.check_name for r in reports if not r.passed]
    if failed:
        logger.warning(f"{len(failed)} 个校验未通过: {', '.join(failed)}")
    return reports
