"""
命令行入口

子命令: simulate, compare, fe-curve, spectrum, bounds
退出码: 0 成功，1 有校验未通过，2 输入/配置错误，3 数值计算失败
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from ..config import ConfigLoader
from ..core.exceptions import InputError, NumericalError, TrialFailure
from ..utils.logger import setup_logger
from .compare import compare_report
from .emit import bounds_frame, emit_fe_curve, spectrum_frame, temperature_grid, write_csv, write_json
from .experiment_config import ExperimentConfig
from .trials import run_trials

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

DEFAULT_ZETAS = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"无法解析为数值列表: {text}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayes-ridge",
        description="高维贝叶斯岭回归：精确有限样本结果与 Monte Carlo 校验",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  # 原始聚合量
  python main.py simulate --config config.example.json --trials 500 --out agg.json

  # 全部校验
  python main.py compare --config config.example.json --checks all --out report.json

  # 渐近自由能曲线
  python main.py fe-curve --zeta 0.1,0.5,0.9 --tmin 1e-9 --tmax 5 --steps 200 --out curve.csv

  # 谱密度与 MP 密度对照
  python main.py spectrum --config config.example.json --out spec.csv

  # 尾界与经验频率
  python main.py bounds --kind noise --delta 0.05,0.1,0.2 --config config.example.json --out bounds.csv
        """
    )
    parser.add_argument("--log-level", default="INFO", help="日志级别（默认 INFO）")
    parser.add_argument("--log-file", default=None, help="日志文件路径（指定后启用文件日志）")

    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="运行系综并输出原始聚合量（JSON）")
    _add_run_options(simulate)

    compare = sub.add_parser("compare", help="解析结果与 Monte Carlo 对照（JSON）")
    _add_run_options(compare)
    compare.add_argument("--checks", default=None, help="逗号分隔的校验名称，或 all")

    curve = sub.add_parser("fe-curve", help="渐近 ML 自由能曲线（CSV）")
    curve.add_argument("--zeta", type=_float_list, default=_float_list(DEFAULT_ZETAS), help="逗号分隔的 ζ 列表")
    curve.add_argument("--tmin", type=float, default=1e-9, help="最低温度（默认 1e-9）")
    curve.add_argument("--tmax", type=float, default=5.0, help="最高温度（默认 5）")
    curve.add_argument("--steps", type=int, default=200, help="温度点数（默认 200）")
    curve.add_argument("--spacing", choices=["linear", "log"], default="linear", help="网格类型")
    curve.add_argument("--sigma0-sq", type=float, default=1.0, help="教师噪声方差 σ0²（默认 1）")
    curve.add_argument("--out", default=None, help="输出 CSV 路径，缺省写到标准输出")

    spectrum = sub.add_parser("spectrum", help="样本协方差谱与 MP 密度（CSV）")
    _add_run_options(spectrum)

    bounds = sub.add_parser("bounds", help="尾界与经验偏差频率（CSV）")
    _add_run_options(bounds)
    bounds.add_argument("--kind", choices=["noise", "mse"], required=True, help="界类型")
    bounds.add_argument("--delta", type=_float_list, required=True, help="逗号分隔的 δ 列表")

    return parser


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="JSON 或 .py 配置文件")
    parser.add_argument("--trials", type=int, default=None, help="覆盖试验次数")
    parser.add_argument("--seed", type=int, default=None, help="覆盖主种子")
    parser.add_argument("--workers", type=int, default=None, help="覆盖工作线程数")
    parser.add_argument("--out", default=None, help="输出路径，缺省取配置 output.path，再缺省写到标准输出")


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    合并配置：默认值 < 配置文件 < 环境变量 < 命令行参数

    Raises:
        ConfigError: 配置无效
    """
    data: Dict[str, Any] = ConfigLoader.load_config(args.config)
    overrides: Dict[str, Any] = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if getattr(args, "checks", None):
        overrides["checks"] = args.checks
    if args.out:
        overrides["output"] = {"path": args.out}
    return ExperimentConfig.from_dict(ConfigLoader.merge_configs(data, overrides))


def _emit(text: str, path: Optional[str]) -> None:
    if not path:
        sys.stdout.write(text)


def cmd_simulate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    stats = run_trials(config)
    path = config.output.path
    _emit(write_json(stats.summary(), path), path)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    reports = compare_report(config)
    path = config.output.path
    _emit(write_json([r.to_dict() for r in reports], path), path)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_fe_curve(args: argparse.Namespace) -> int:
    grid = temperature_grid(args.tmin, args.tmax, args.steps, args.spacing)
    frame = emit_fe_curve(args.zeta, grid, args.sigma0_sq, args.out)
    _emit(write_csv(frame), args.out)
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    path = config.output.path
    _emit(write_csv(spectrum_frame(config), path), path)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    path = config.output.path
    _emit(write_csv(bounds_frame(args.kind, args.delta, config), path), path)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "fe-curve": cmd_fe_curve,
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行主函数

    Args:
        argv: 参数列表，None 时读取 sys.argv

    Returns:
        int: 退出码
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        setup_logger(level=args.log_level, log_file=args.log_file, enable_file_logging=args.log_file is not None)
    except ValueError as e:
        parser.error(str(e))

    try:
        return COMMANDS[args.command](args)
    except InputError as e:
        logger.error(f"输入错误: {e}")
        return EXIT_INPUT_ERROR
    except (NumericalError, TrialFailure) as e:
        logger.error(f"数值计算失败: {e}")
        return EXIT_NUMERICAL_ERROR


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n用户中断")
        sys.exit(130)
