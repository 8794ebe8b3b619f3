"""
测试 Monte Carlo 校验框架：试验执行、矩合并、校验注册、对照报告、文件输出与命令行
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from src.analytics import noise_tail_bound
from src.core.exceptions import DomainError, NumericalError, TrialFailure, UnsupportedCheck
from src.core.model import SpectralDensity
from src.freenergy import asymptotic_ml_fe, map_avg_fe_density
from src.harness import (
    CheckFactory,
    CheckName,
    ExperimentConfig,
    StreamingMoments,
    Verdict,
    bounds_frame,
    compare_report,
    emit_fe_curve,
    merge_in_order,
    run_trials,
    spectrum_frame,
    temperature_grid,
)
from src.harness import cli
from src.harness.report import json_safe, z_score


def _config(**overrides):
    base = {"n": 40, "d": 20, "trials": 96, "workers": 2, "master_seed": 123, "checks": ["helmholtz"]}
    base.update(overrides)
    return ExperimentConfig.from_dict(base)


def test_streaming_moments_merge_matches_direct():
    """分块合并的均值与协方差与整体计算一致"""
    rows = np.random.default_rng(0).standard_normal((70, 3))
    names = ("a", "b", "c")
    parts = [StreamingMoments.from_block(names, rows[i:i + 32]) for i in range(0, 70, 32)]
    merged = merge_in_order(parts, names)
    assert merged.count == 70
    np.testing.assert_allclose(merged.mean, rows.mean(axis=0), rtol=1e-12)
    np.testing.assert_allclose(merged.covariance, np.cov(rows, rowvar=False), rtol=1e-10)
    assert np.isnan(StreamingMoments.from_block(names, rows[:1]).covariance).all()
    with pytest.raises(KeyError):
        merged.index("z")


def test_run_trials_independent_of_worker_count():
    """结果与 worker 数无关（逐位相同）"""
    single = run_trials(_config(workers=1), {"ml", "fe"})
    multi = run_trials(_config(workers=4), {"ml", "fe"})
    pd.testing.assert_frame_equal(single.table, multi.table)
    np.testing.assert_array_equal(single.moments.mean, multi.moments.mean)
    np.testing.assert_array_equal(single.moments.m2, multi.moments.m2)
    assert single.summary()["config_hash"] == multi.summary()["config_hash"]


def test_run_trials_table_and_summary():
    stats = run_trials(_config(), {"ml", "eigenvalues"})
    assert stats.count == 96
    assert list(stats.table.index[:3]) == [0, 1, 2]
    assert {"sigma_ml", "rss", "mse", "mse_sum", "theta_ml_dev"} <= set(stats.table.columns)
    np.testing.assert_allclose(stats.column("rss"), 40 * stats.column("sigma_ml"))
    assert len(stats.eigenvalues) == 96
    assert stats.pooled_density().samples.size == 96 * 20
    summary = stats.summary()
    assert summary["completed"] == 96
    assert summary["observables"]["sigma_ml"]["count"] == 96
    json.dumps(json_safe(summary))


def test_run_trials_unknown_group():
    with pytest.raises(DomainError):
        run_trials(_config(), {"nonsense"})


def test_trial_failures_and_budget():
    """β ≤ ζ 时 Ψ 在每个试验都报错：超出预算抛出 TrialFailure，预算内记录失败"""
    config = _config(trials=8, beta=0.3)
    with pytest.raises(TrialFailure) as info:
        run_trials(config, {"psi"})
    assert info.value.trial_index == 0

    stats = run_trials(config.with_overrides(failure_budget=8), {"psi"})
    assert stats.count == 0
    assert [f["trial"] for f in stats.failures] == list(range(8))
    assert stats.failures[0]["error"] == "TemperatureOutOfRange"


def test_fixed_design_mode_shares_design():
    stats = run_trials(_config(design_mode="fixed", trials=40), {"eigenvalues"})
    first = stats.eigenvalues[0]
    for eigs in stats.eigenvalues[1:]:
        np.testing.assert_array_equal(eigs, first)


def test_check_factory():
    """按名称创建校验，"all" 展开为全部已注册校验并去重"""
    assert len(CheckFactory.get_available_checks()) == 22
    check = CheckFactory.create_from_string("NOISE-MEAN")
    assert check.check_name is CheckName.NOISE_MEAN
    assert CheckFactory.is_available("mp-ks")
    assert not CheckFactory.is_available("bogus")
    with pytest.raises(UnsupportedCheck):
        CheckFactory.create_from_string("bogus")
    checks = CheckFactory.create_many(["helmholtz", "all", "helmholtz"])
    assert len(checks) == 22
    assert checks[0].check_name is CheckName.HELMHOLTZ


def test_z_score_edge_cases():
    assert z_score(1.0, 1.5, 0.25) == pytest.approx(2.0)
    assert z_score(1.0, 1.0, 0.0) == 0.0
    assert z_score(1.0, 2.0, 0.0) == math.inf
    assert json_safe({"x": math.nan, "c": 1 + 2j}) == {"x": "nan", "c": {"real": 1.0, "imag": 2.0}}


def test_compare_report_passing_checks():
    """Helmholtz 恒等式与噪声均值的对照"""
    config = _config(trials=200, z_threshold=4.0)
    reports = compare_report(config, ["helmholtz", "noise-mean", "mp-ks"])
    names = [r.check_name for r in reports]
    assert names == ["helmholtz", "noise-mean", "mp-ks"]
    helmholtz = reports[0]
    assert helmholtz.verdict is Verdict.PASS
    assert helmholtz.z_score == 0.0
    assert reports[1].analytic == pytest.approx(0.5)
    assert reports[1].passed
    assert reports[1].metadata["config_hash"] == config.config_hash
    payload = reports[1].to_dict()
    assert payload["verdict"] == "pass"


def test_compare_report_rejects_inapplicable_check():
    """η > 0 时能量-熵协方差校验不适用，在运行前报错"""
    with pytest.raises(UnsupportedCheck):
        compare_report(_config(eta=0.5), ["cov-E-S-zero"])
    with pytest.raises(UnsupportedCheck):
        compare_report(_config(beta="inf"), ["helmholtz"])


def test_compare_report_noise_checks():
    """噪声估计量的方差、MGF、特征函数与尾界"""
    reports = compare_report(
        _config(trials=1500, z_threshold=4.0),
        ["noise-var", "noise-mgf", "noise-cf", "noise-tail-bound"],
    )
    assert all(r.verdict is Verdict.PASS for r in reports)
    var, mgf, cf, tail = reports
    # N=40, ζ=0.5, σ0²=1
    assert var.analytic == pytest.approx(2.0 * 0.5 / 40)
    assert mgf.analytic == pytest.approx(-20.0 * 0.5 * math.log(1.0 - 0.1))
    for point in cf.metadata["points"]:
        assert abs(point["analytic"] - (1.0 - 2.0j * point["a"]) ** -10) < 1e-12
    assert tail.analytic == pytest.approx(noise_tail_bound(0.2, 40, 0.5, 1.0).bound)
    assert tail.empirical <= tail.analytic


def test_compare_report_distribution_laws():
    """ML 坐标的 Student-t 律与固定设计下 MAP 的条件正态律"""
    config = _config(trials=3000, check_params={"ks_alpha": 1e-3})
    student, gaussian = compare_report(config, ["student-t-marginal-ks", "map-conditional-gaussian-ks"])
    assert student.verdict is Verdict.PASS
    assert student.analytic == pytest.approx(0.5 / (0.5 - 1.0 / 40))
    assert student.metadata["degrees_of_freedom"] == 21
    # η = 0 时条件均值就是 θ0
    assert gaussian.verdict is Verdict.PASS
    assert gaussian.analytic == pytest.approx(1.0, abs=1e-8)


def test_compare_report_mse_checks_at_finite_n():
    """N=200、d=100 时 MSE 方差取有限 N 精确值，约为大 N 近似的两倍"""
    config = _config(n=200, d=100, trials=2000, z_threshold=4.0)
    mean_report, var_report, cf_report = compare_report(config, ["mse-mean", "mse-var", "mse-cf"])
    mean = 0.5 / (1.0 - 0.5 - 1.0 / 200)
    second = 0.25 / ((1.0 - 0.5 - 1.0 / 200) * (1.0 - 0.5 - 3.0 / 200)) * (1.0 + 2.0 / 100)
    assert mean_report.analytic == pytest.approx(mean)
    assert var_report.analytic == pytest.approx(second - mean ** 2)
    assert var_report.metadata["large_n_variance"] == pytest.approx(0.02)
    assert var_report.analytic > 2.0 * var_report.metadata["large_n_variance"]
    assert abs(var_report.empirical - var_report.analytic) < abs(
        var_report.empirical - var_report.metadata["large_n_variance"]
    )
    assert all(r.verdict is Verdict.PASS for r in (mean_report, var_report, cf_report))

    with pytest.raises(UnsupportedCheck):
        compare_report(_config(n=23, d=20), ["mse-var"])


def test_mse_deviation_decay_centres_on_finite_n_mean():
    """偏差事件以各规模的有限 N 均值 ζσ0²/(1−ζ−1/N) 为中心"""
    config = _config(trials=200, check_params={"decay_sizes": [40, 80]})
    (report,) = compare_report(config, ["mse-deviation-decay"])
    levels = report.metadata["levels"]
    assert [level["n"] for level in levels] == [40, 80]
    assert levels[0]["center"] == pytest.approx(0.5 / (0.5 - 1.0 / 40))
    assert levels[1]["center"] == pytest.approx(0.5 / (0.5 - 1.0 / 80))
    assert report.metadata["delta"] == pytest.approx(0.25)


def test_compare_report_ml_free_energy_checks():
    """ML 自由能：E/S 不相关、平均密度与方差；方差几乎全部来自能量项"""
    config = _config(trials=400, z_threshold=4.0)
    cov, density, variance = compare_report(config, ["cov-E-S-zero", "ml-fe-density", "ml-fe-variance"])
    assert cov.analytic == 0.0 and cov.verdict is Verdict.PASS
    assert density.verdict is Verdict.PASS
    assert density.analytic == pytest.approx(density.metadata["marchenko_pastur_value"], abs=0.03)
    assert variance.verdict is Verdict.PASS
    meta = variance.metadata
    assert meta["energy_term"] == pytest.approx(0.5 / (2.0 * 40))
    assert meta["energy_term"] + meta["entropy_term"] == pytest.approx(variance.analytic)
    assert abs(meta["entropy_share"]) < 0.1


def test_compare_report_map_free_energy_density():
    config = _config(trials=600, eta=0.5, theta_prior_var=1.0, z_threshold=4.0)
    (report,) = compare_report(config, ["map-fe-density"])
    assert report.verdict is Verdict.PASS
    mp_value = map_avg_fe_density(0.5, 1.0, 1.0, 1.0, 0.5, 1.0, SpectralDensity.marchenko_pastur(0.5))
    assert report.analytic == pytest.approx(mp_value, abs=0.03)


def test_compare_report_asymptotic_free_energy():
    config = _config(n=200, d=100, trials=32, check_params={"asymptotic_fe_atol": 0.05})
    (report,) = compare_report(config, ["asymptotic-fe"])
    assert report.analytic == pytest.approx(asymptotic_ml_fe(0.5, 1.0, 1.0))
    assert report.verdict is Verdict.PASS


def test_compare_report_sigma_checks():
    """β=2、η=0、平坦先验：不动点均值 β(1−ζ)σ0²/(β−ζ)，β=1 时无偏，Ψ 的方差按 1/N 缩小"""
    config = _config(trials=400, beta=2.0, z_threshold=4.0, check_params={"self_avg_sizes": [40, 160]})
    fixed, unbiased, averaging = compare_report(
        config, ["sigma-fixed-point-beta", "sigma-unbiased-beta1", "sigma-recursion-self-averaging"]
    )
    assert fixed.analytic == pytest.approx(2.0 * 0.5 / 1.5)
    assert unbiased.analytic == 1.0
    assert averaging.analytic == pytest.approx(4.0)
    assert [level["n"] for level in averaging.metadata["levels"]] == [40, 160]
    assert all(r.verdict is Verdict.PASS for r in (fixed, unbiased, averaging))


def test_emit_fe_curve(tmp_path):
    """CSV 含临界温度行；T > 1/ζ 的行发散且 f_beta 为空"""
    path = tmp_path / "curve.csv"
    frame = emit_fe_curve([0.5, 0.25], temperature_grid(0.5, 3.0, 6), 1.0, str(path))
    assert list(frame.columns) == ["zeta", "temperature", "f_beta", "divergent"]
    assert list(frame["zeta"].unique()) == [0.25, 0.5]
    half = frame[frame["zeta"] == 0.5]
    assert 2.0 in half["temperature"].tolist()
    divergent = half[half["temperature"] > 2.0]
    assert (divergent["divergent"] == 1).all() and divergent["f_beta"].isna().all()
    assert (half[half["temperature"] <= 2.0]["divergent"] == 0).all()

    reread = pd.read_csv(path)
    assert reread.shape == frame.shape
    np.testing.assert_array_equal(reread["temperature"].to_numpy(), frame["temperature"].to_numpy())


def test_temperature_grid():
    np.testing.assert_allclose(temperature_grid(1.0, 100.0, 3, "log"), [1.0, 10.0, 100.0])
    with pytest.raises(DomainError):
        temperature_grid(2.0, 1.0, 5)
    with pytest.raises(DomainError):
        temperature_grid(1.0, 2.0, 5, "cubic")


def test_spectrum_and_bounds_frames():
    config = _config(trials=40)
    spectrum = spectrum_frame(config)
    assert list(spectrum.columns) == ["lambda", "empirical_density", "mp_density"]
    widths = np.diff(spectrum["lambda"].to_numpy())
    assert float(np.sum(spectrum["empirical_density"].to_numpy()[:-1] * widths)) == pytest.approx(1.0, abs=0.1)

    bounds = bounds_frame("noise", [0.1, 0.2, 0.3], config)
    assert list(bounds.columns) == ["delta", "bound", "lower_rate", "upper_rate", "empirical_frequency"]
    assert np.all(np.diff(bounds["bound"].to_numpy()) < 0)
    mse = bounds_frame("mse", [0.5, 1.0], config)
    assert list(mse.columns) == ["delta", "bound", "rate_minus", "rate_plus", "empirical_frequency"]
    with pytest.raises(DomainError):
        bounds_frame("energy", [0.1], config)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({"n": 40, "d": 20, "trials": 64, "workers": 2}), encoding="utf-8")
    return str(path)


def test_cli_compare_exit_codes(tmp_path, config_file):
    """全部通过返回 0，有校验未通过返回 1，配置错误返回 2"""
    out = tmp_path / "report.json"
    assert cli.main(["compare", "--config", config_file, "--checks", "helmholtz", "--out", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report[0]["check_name"] == "helmholtz"

    failing = tmp_path / "failing.json"
    failing.write_text(
        json.dumps({"n": 40, "d": 20, "trials": 8, "check_params": {"helmholtz_tol": -1.0}}), encoding="utf-8"
    )
    assert cli.main(["compare", "--config", str(failing), "--checks", "helmholtz", "--out", str(out)]) == 1
    assert cli.main(["compare", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["compare", "--config", config_file, "--checks", "bogus"]) == 2


def test_cli_simulate_to_stdout(config_file, capsys):
    assert cli.main(["simulate", "--config", config_file, "--trials", "16", "--seed", "9"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["completed"] == 16
    assert payload["master_seed"] == 9
    assert "sigma_ml" in payload["observables"]


def test_cli_numerical_failure_exit_code(config_file, monkeypatch):
    def broken(*args, **kwargs):
        raise NumericalError("模拟的数值失败")

    monkeypatch.setattr(cli, "run_trials", broken)
    assert cli.main(["simulate", "--config", config_file]) == 3


def test_cli_fe_curve_and_bounds(tmp_path, config_file):
    curve = tmp_path / "curve.csv"
    assert cli.main(["fe-curve", "--zeta", "0.2,0.8", "--tmin", "0.1", "--tmax", "6", "--steps", "7",
                     "--out", str(curve)]) == 0
    frame = pd.read_csv(curve)
    assert set(frame["zeta"]) == {0.2, 0.8}

    bounds = tmp_path / "bounds.csv"
    assert cli.main(["bounds", "--kind", "noise", "--delta", "0.1,0.2", "--config", config_file,
                     "--out", str(bounds)]) == 0
    assert len(pd.read_csv(bounds)) == 2
    assert cli.main(["fe-curve", "--tmin", "5", "--tmax", "1"]) == 2


def test_cli_usage_errors():
    with pytest.raises(SystemExit) as info:
        cli.main(["bounds", "--kind", "energy", "--delta", "0.1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["--log-level", "LOUD", "fe-curve"])
    assert info.value.code == 2
