"""
测试条件/全自由能、系综平均式与渐近闭式
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from src.core.exceptions import DomainError, SpectrumDomainError, TemperatureOutOfRange
from src.core.model import DivergentFlag, NoisePrior, RegressionInstance, SpectralDensity
from src.estimators import ml_noise_estimate
from src.freenergy import (
    asymptotic_ml_fe,
    asymptotic_sigma_sq,
    conditional_free_energy,
    conditional_free_energy_value,
    fe_curve,
    free_energy_bracket,
    full_free_energy,
    map_avg_fe_density,
    map_variance_kernel,
    marginal_sigma_density,
    minimize_free_energy_bracket,
    ml_avg_fe_density,
    ml_energy_variance,
    ml_entropy_variance,
    ml_fe_density_variance,
    ml_fe_limits,
    ml_variance_kernel,
)
from src.sampler import SeedSpec, sample_instance
from src.spectra import CorrelationKernel, covariance_eigenvalues


def _instance(n=40, d=10, seed=21):
    return sample_instance(n, d, np.eye(d), 1.0, 1.0, SeedSpec(seed))


def test_conditional_free_energy_matches_direct_integral():
    """d = 1 时 F = −(1/β)·log ∫exp(−βE(θ))dθ"""
    instance = sample_instance(6, 1, np.eye(1), 1.0, 0.0, SeedSpec(4), scaled=False)
    sigma_sq, eta, beta = 0.8, 0.3, 2.0

    def energy(theta):
        residual = instance.targets - instance.design[:, 0] * theta
        return residual @ residual / (2.0 * sigma_sq) + 0.5 * eta * theta * theta

    breakdown = conditional_free_energy(instance, sigma_sq, eta, beta)
    e_min = conditional_free_energy_value(instance, sigma_sq, eta, math.inf)
    mass, _ = integrate.quad(lambda th: math.exp(-beta * (energy(th) - e_min)), -np.inf, np.inf, epsabs=1e-13)
    assert breakdown.free_energy == pytest.approx(e_min - math.log(mass) / beta, rel=1e-9)
    assert breakdown.helmholtz_defect <= 1e-12


def test_conditional_free_energy_requires_finite_beta():
    with pytest.raises(DomainError):
        conditional_free_energy(_instance(), 1.0, 0.0, math.inf)


def test_conditional_free_energy_invariant_under_row_permutation():
    """同时置换 Z 与 t 的行只改变样本顺序，F 不变"""
    instance = _instance()
    order = np.random.default_rng(3).permutation(instance.n)
    shuffled = RegressionInstance(
        instance.design[order], instance.targets[order], instance.theta0, instance.sigma0_sq, instance.scaled
    )
    for eta, beta in [(0.0, 1.0), (0.5, 2.0)]:
        original = conditional_free_energy(instance, 1.0, eta, beta).free_energy
        permuted = conditional_free_energy(shuffled, 1.0, eta, beta).free_energy
        assert permuted == pytest.approx(original, rel=1e-10)


def test_ml_avg_density_is_exact_per_instance():
    """F/N 去掉 RSS 涨落后等于以该实例谱计算的平均式"""
    instance = _instance()
    sigma_sq, beta = 0.9, 1.5
    n, zeta = instance.n, instance.zeta
    rho = SpectralDensity.from_samples(covariance_eigenvalues(instance.design, True))
    f = conditional_free_energy(instance, sigma_sq, 0.0, beta).free_energy / n
    rss = ml_noise_estimate(instance) * n
    fluctuation = rss / (2.0 * sigma_sq * n) - 0.5 * (instance.sigma0_sq / sigma_sq) * (1.0 - zeta)
    assert f - fluctuation == pytest.approx(ml_avg_fe_density(zeta, beta, sigma_sq, instance.sigma0_sq, rho), rel=1e-10)


def test_map_avg_reduces_to_ml():
    """η = 0 时 MAP 平均式与 ML 平均式相同"""
    rho = SpectralDensity.marchenko_pastur(0.3)
    ml = ml_avg_fe_density(0.3, 2.0, 0.8, 1.0, rho)
    assert map_avg_fe_density(0.3, 2.0, 0.8, 1.0, 0.0, 0.5, rho) == pytest.approx(ml, rel=1e-12)
    with pytest.raises(SpectrumDomainError):
        ml_avg_fe_density(0.3, 2.0, 0.8, 1.0, SpectralDensity.from_samples([0.0, 1.0]))


def test_map_variance_kernel_cross_sign():
    """两种符号只有交叉项相反，对称部分不小于 log-log 项"""
    lam = np.array([0.5, 1.0])
    args = (0.4, 2.0, 0.7, 1.0, 0.3, 1.0)
    plus = map_variance_kernel(lam, lam[::-1], *args)
    minus = map_variance_kernel(lam, lam[::-1], *args, literal_cross_sign=True)
    symmetric = 0.5 * (plus + minus)
    c = 0.4 * 0.7 * 0.3
    log_log = 0.25 * (0.4 / 2.0) ** 2 * np.log(lam + c) * np.log(lam[::-1] + c)
    assert np.all(symmetric >= log_log - 1e-15)


def test_full_free_energy_zero_temperature():
    """β = +inf、η = 0、平坦先验: min G = N/2 + (N/2)·log(2π·RSS/N)"""
    instance = _instance()
    n = instance.n
    rss_over_n = ml_noise_estimate(instance)
    expected = 0.5 * n + 0.5 * n * math.log(2.0 * math.pi * rss_over_n)
    assert full_free_energy(instance, 0.0, math.inf, NoisePrior.flat()) == pytest.approx(expected, rel=1e-9)


def test_full_free_energy_delta_prior():
    """Delta 先验: F_{β,σ0²} + (N/2)·log(2πσ0²)"""
    instance = _instance()
    prior = NoisePrior.delta(0.7)
    expected = conditional_free_energy(instance, 0.7, 0.2, 2.0).free_energy + 0.5 * instance.n * math.log(2.0 * math.pi * 0.7)
    assert full_free_energy(instance, 0.2, 2.0, prior) == pytest.approx(expected, rel=1e-12)
    assert free_energy_bracket(instance, 0.7, 0.2, 2.0, prior) == pytest.approx(expected, rel=1e-12)


def test_full_free_energy_finite_beta_is_finite():
    instance = _instance()
    value = full_free_energy(instance, 0.1, 1.0, NoisePrior.inverse_gamma(2.0, 1.0))
    laplace = full_free_energy(instance, 0.1, 1.0, NoisePrior.inverse_gamma(2.0, 1.0), laplace=True)
    assert math.isfinite(value) and math.isfinite(laplace)


def test_marginal_sigma_density_mode():
    """β = 1、η = 0、平坦先验时边缘密度众数为 RSS/(N − d)"""
    instance = _instance()
    rss = ml_noise_estimate(instance) * instance.n
    mode = rss / (instance.n - instance.d)
    grid = np.linspace(0.2 * mode, 3.0 * mode, 4001)
    density = marginal_sigma_density(instance, 0.0, 1.0, NoisePrior.flat(), grid)
    assert integrate.trapezoid(density, grid) == pytest.approx(1.0, rel=1e-9)
    assert grid[np.argmax(density)] == pytest.approx(mode, rel=2e-3)


def test_asymptotic_endpoints():
    """β → ∞ 与 β = ζ 处与端点极限一致"""
    zeta, sigma0_sq = 0.4, 1.3
    high, critical = ml_fe_limits(zeta, sigma0_sq)
    assert asymptotic_ml_fe(zeta, math.inf, sigma0_sq) == high
    assert asymptotic_ml_fe(zeta, 1e9, sigma0_sq) == pytest.approx(high, rel=1e-6)
    assert asymptotic_ml_fe(zeta, zeta, sigma0_sq) == pytest.approx(critical, rel=1e-12)
    assert asymptotic_ml_fe(zeta, 0.5 * zeta, sigma0_sq) is DivergentFlag.DIVERGENT


def test_asymptotic_sigma_sq():
    assert asymptotic_sigma_sq(0.5, math.inf, 2.0) == pytest.approx(1.0)
    assert asymptotic_sigma_sq(0.5, 1.0, 2.0) == pytest.approx(2.0)
    with pytest.raises(TemperatureOutOfRange):
        asymptotic_sigma_sq(0.5, 0.5, 2.0)


def test_fe_curve_divergence_and_critical_point():
    """T > 1/ζ 的点发散；include_critical 在每个 ζ 末尾追加 T = 1/ζ"""
    points = fe_curve([0.5], [0.5, 1.0, 3.0], 1.0, include_critical=True)
    assert [p.temperature for p in points] == [0.5, 1.0, 3.0, 2.0]
    assert [p.divergent for p in points] == [False, False, True, False]
    assert points[-1].value == pytest.approx(ml_fe_limits(0.5, 1.0)[1])


def test_minimize_free_energy_bracket_zero_temperature():
    """β = +inf、平坦先验时最小点为 RSS/N，最小值即零温全自由能"""
    instance = _instance()
    sigma_sq, value = minimize_free_energy_bracket(instance, 0.0, math.inf, NoisePrior.flat())
    assert sigma_sq == pytest.approx(ml_noise_estimate(instance), rel=1e-4)
    assert value == pytest.approx(full_free_energy(instance, 0.0, math.inf, NoisePrior.flat()), rel=1e-9)

    delta_sigma, delta_value = minimize_free_energy_bracket(instance, 0.2, 2.0, NoisePrior.delta(0.7))
    assert delta_sigma == 0.7
    assert delta_value == pytest.approx(free_energy_bracket(instance, 0.7, 0.2, 2.0, NoisePrior.delta(0.7)))


def test_ml_variance_components():
    """能量项闭式；熵项由相关核给出；总方差为能量项 + T²·熵项"""
    zeta, beta, sigma_sq, sigma0_sq, n = 0.5, 2.0, 0.8, 1.0, 200
    assert ml_energy_variance(zeta, sigma_sq, sigma0_sq, n) == pytest.approx(
        sigma0_sq ** 2 * (1 - zeta) / (2 * sigma_sq ** 2 * n)
    )

    grid = np.array([0.5, 1.0, 2.0])
    widths = np.full(3, 0.5)
    matrix = np.array([[0.04, 0.01, 0.0], [0.01, 0.09, 0.02], [0.0, 0.02, 0.16]])
    kernel = CorrelationKernel(grid, widths, matrix, 50)
    weights = np.log(grid) * widths
    entropy = ml_entropy_variance(zeta, kernel)
    assert entropy == pytest.approx(0.25 * zeta ** 2 * weights @ matrix @ weights)
    assert ml_entropy_variance(zeta, CorrelationKernel.zeros(grid, widths)) == 0.0
    assert ml_fe_density_variance(zeta, beta, sigma_sq, sigma0_sq, n, kernel) == pytest.approx(
        ml_energy_variance(zeta, sigma_sq, sigma0_sq, n) + entropy / beta ** 2
    )

    lam = np.array([math.e, 1.0])
    np.testing.assert_allclose(ml_variance_kernel(lam, np.full(2, math.e), zeta, 1.0), [zeta ** 2 / 4, 0.0])


def test_ml_entropy_variance_rejects_nonpositive_grid():
    kernel = CorrelationKernel.zeros(np.array([0.0, 1.0]), np.ones(2))
    with pytest.raises(SpectrumDomainError):
        ml_entropy_variance(0.5, kernel)
