"""
测试估计量分布、噪声估计量与 MSE 的解析结果
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate, stats

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from src.analytics import (
    gamma_density,
    map_conditional_gaussian,
    ml_estimator_covariance,
    mse_cf,
    mse_deviation_bound,
    mse_mean_var,
    mse_rate_minus,
    mse_rate_plus,
    mse_second_moment,
    mu_of,
    noise_cf,
    noise_log_mgf,
    noise_moments,
    noise_tail_bound,
    noise_tail_exponent,
    student_t_logpdf,
    student_t_marginal,
)
from src.core.exceptions import (
    AlphaOutOfRange,
    DegreesOfFreedomError,
    DeltaOutOfRange,
    DomainError,
    MGFPole,
)
from src.estimators import ml_noise_estimate
from src.sampler import SeedSpec, sample_instance


def test_noise_moments_match_simulation():
    """σ̂²_ML 的均值 σ0²(1−ζ)，与模拟一致（4 个标准误内）"""
    n, d, trials = 40, 20, 400
    samples = np.array([
        ml_noise_estimate(sample_instance(n, d, np.eye(d), 1.0, 0.0, SeedSpec(3, i)))
        for i in range(trials)
    ])
    mean, var = noise_moments(n, d / n, 1.0)
    assert mean == pytest.approx(0.5)
    assert var == pytest.approx(2.0 * 0.5 / 40)
    assert abs(samples.mean() - mean) < 4.0 * math.sqrt(var / trials)


def test_noise_mgf_and_cf():
    """MGF 在 0 处为 1、在 α = 1/σ0² 处有极点；CF 与 χ² 一致"""
    assert noise_log_mgf(0.0, 50, 0.3, 2.0) == 0.0
    with pytest.raises(MGFPole):
        noise_log_mgf(0.5, 50, 0.3, 2.0)
    assert noise_cf(0.0, 50, 0.3, 2.0) == pytest.approx(1.0)

    # RSS/σ0² ~ χ²_{N−d}
    n, zeta, sigma0_sq, a = 50, 0.3, 2.0, 0.07
    k = n * (1.0 - zeta)
    expected = (1.0 - 2j * a * sigma0_sq) ** (-k / 2.0)
    assert noise_cf(a, n, zeta, sigma0_sq) == pytest.approx(expected, rel=1e-12)
    assert abs(noise_cf(a, n, zeta, sigma0_sq)) <= 1.0


def test_noise_tail_bound():
    """两侧速率为正，界随 N 增大而下降；δ 超出范围报错"""
    tail = noise_tail_bound(0.1, 100, 0.5, 1.0)
    assert tail.lower_rate > 0 and tail.upper_rate > 0
    assert 0 < tail.bound <= 2.0
    assert noise_tail_bound(0.1, 400, 0.5, 1.0).bound < tail.bound
    # 最优 α 处的速率等于闭式
    assert noise_tail_exponent(0.1, tail.upper_alpha, 100, 0.5, 1.0, True) == pytest.approx(tail.upper_rate)
    assert noise_tail_exponent(0.1, tail.lower_alpha, 100, 0.5, 1.0, False) == pytest.approx(tail.lower_rate)
    with pytest.raises(DeltaOutOfRange):
        noise_tail_bound(0.6, 100, 0.5, 1.0)
    with pytest.raises(AlphaOutOfRange):
        noise_tail_exponent(0.1, 1.0, 100, 0.5, 1.0, True)


def test_noise_tail_rates_increase_with_delta():
    """两侧 Chernoff 速率关于 δ 严格递增"""
    deltas = np.linspace(0.02, 0.48, 24)
    tails = [noise_tail_bound(delta, 100, 0.5, 1.0) for delta in deltas]
    assert np.all(np.diff([t.lower_rate for t in tails]) > 0)
    assert np.all(np.diff([t.upper_rate for t in tails]) > 0)


def test_student_t_marginal_variance():
    """Student-t 边缘分布的方差等于 θ̂_ML 的协方差对角元"""
    n, d = 60, 20
    law = student_t_marginal(0, np.zeros(d), np.eye(d), d / n, 1.0, n)
    cov = ml_estimator_covariance(np.eye(d), d / n, 1.0, n)
    assert law.var() == pytest.approx(cov[0, 0], rel=1e-12)
    with pytest.raises(DegreesOfFreedomError):
        ml_estimator_covariance(np.eye(d), d / n, 1.0, d + 1)


def test_student_t_logpdf_one_dimension():
    """d = 1 时多元 Student-t 密度退化为一维 t 分布"""
    n = 30
    law = student_t_marginal(0, np.array([0.3]), np.array([[2.0]]), 1.0 / n, 1.5, n)
    for x in (-1.0, 0.3, 2.5):
        value = student_t_logpdf(np.array([x]), np.array([0.3]), np.array([[2.0]]), 1.0 / n, 1.5, n)
        assert value == pytest.approx(law.logpdf(x), rel=1e-10)


def test_student_t_density_normalized_in_two_dimensions():
    """d = 2 时多元 Student-t 密度在平面上积分为 1"""
    n = 8
    theta0 = np.array([0.2, -0.1])
    sigma_pop = np.array([[2.0, 0.5], [0.5, 1.0]])

    def density(y, x):
        return math.exp(student_t_logpdf(np.array([x, y]), theta0, sigma_pop, 2 / n, 1.0, n))

    total, _ = integrate.dblquad(density, -np.inf, np.inf, -np.inf, np.inf, epsabs=1e-10)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_map_conditional_gaussian_ml_limit():
    """η = 0 时条件分布为 N(θ0, ζσ0²C⁻¹)"""
    rng = np.random.default_rng(2)
    x = rng.standard_normal((50, 5))
    c_hat = x.T @ x / 50
    theta0 = np.arange(5.0)
    law = map_conditional_gaussian(c_hat, theta0, 0.1, 1.0, 0.0, 2.0)
    np.testing.assert_allclose(law.mean, theta0, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(law.covariance, 0.2 * np.linalg.inv(c_hat), rtol=1e-9)
    assert law.marginal(1).mean() == pytest.approx(1.0)


def test_map_conditional_gaussian_shrinks():
    """η > 0 时均值向 0 收缩"""
    c_hat = np.diag([1.0, 2.0])
    law = map_conditional_gaussian(c_hat, np.array([1.0, 1.0]), 0.5, 1.0, 2.0, 1.0)
    np.testing.assert_allclose(law.mean, [1.0 / 2.0, 2.0 / 3.0])


def test_mse_moments():
    """Σ = I: 均值 ζσ0²/(1−ζ−1/N)；二阶矩 ≥ 均值平方"""
    n, d = 100, 40
    mean, var = mse_mean_var(n, d, 1.0, np.ones(d))
    assert mean == pytest.approx(0.4 / (0.6 - 0.01))
    assert var == pytest.approx(2.0 * 0.16 / 0.36 / d)
    assert mse_second_moment(n, d, 1.0, np.ones(d)) > mean ** 2
    with pytest.raises(DegreesOfFreedomError):
        mse_mean_var(d + 1, d, 1.0, np.ones(d))


def test_mse_cf_normalization_and_mean():
    """CF(0) = 1，且 −i·CF'(0) = E‖θ0 − θ̂‖² = d·均值"""
    n, d = 30, 10
    eigs = np.ones(d)
    assert mse_cf(0.0, n, d, 1.0, eigs) == pytest.approx(1.0, abs=1e-8)
    h = 1e-4
    derivative = (mse_cf(h, n, d, 1.0, eigs) - mse_cf(-h, n, d, 1.0, eigs)) / (2.0 * h)
    mean, _ = mse_mean_var(n, d, 1.0, eigs)
    assert derivative.imag == pytest.approx(d * mean, rel=1e-4)


def test_mse_rate_branches():
    """负分支 α 有上界；正分支对所有 α 有效"""
    mu = mu_of(1.0, 0.5, 1.0)
    assert mu == pytest.approx(1.0)
    minus = mse_rate_minus(0.1, mu, 0.5, 0.25)
    assert minus.saddle > minus.alpha
    assert minus.rate > 0
    with pytest.raises(AlphaOutOfRange):
        mse_rate_minus(0.5, mu, 0.5, 0.25)
    plus = mse_rate_plus(5.0, mu, 0.5, 0.25)
    assert plus.saddle > 0
    assert plus.branch == "plus"


def test_mse_deviation_bound():
    """最优 α 的偏差界两个速率为正，且随 N 指数下降"""
    small = mse_deviation_bound(0.25, 1e-3, 100, 50, 1.0, 1.0, 1.0, 0.5, optimize_alpha=True)
    large = mse_deviation_bound(0.25, 1e-3, 400, 200, 1.0, 1.0, 1.0, 0.5, optimize_alpha=True)
    assert small.rate_minus > 0 and small.rate_plus > 0
    assert large.bound < small.bound
    assert small.label == "exponent-order bound"
    with pytest.raises(DeltaOutOfRange):
        mse_deviation_bound(0.0, 1e-3, 100, 50, 1.0, 1.0, 1.0, 0.5)


def test_gamma_density_is_unit_mean_gamma():
    """Γ_ν 即形状 ν/2、尺度 2/ν 的 Gamma 密度"""
    for nu in (1.0, 4.0, 30.0):
        law = stats.gamma(a=nu / 2, scale=2 / nu)
        for omega in (0.3, 1.0, 2.5):
            assert gamma_density(nu, omega) == pytest.approx(law.pdf(omega), rel=1e-10)
    mean, _ = integrate.quad(lambda w: w * gamma_density(4.0, w), 0.0, np.inf)
    assert mean == pytest.approx(1.0, rel=1e-8)
    with pytest.raises(DomainError):
        gamma_density(0.0, 1.0)
