"""
测试领域模型、岭系统与序列化
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from src.core.exceptions import DataError, DomainError, PriorError, ShapeError, SingularSystem
from src.core.linalg import RidgeSystem
from src.core.model import (
    FreeEnergyBreakdown,
    HyperParams,
    NoisePrior,
    PopulationModel,
    RegressionInstance,
    SpectralDensity,
)
from src.core.serialization import canonical_hash, encode_float, from_dict, to_dict


def _instance(n=6, d=3, seed=0):
    rng = np.random.default_rng(seed)
    design = rng.standard_normal((n, d))
    theta0 = np.ones(d)
    targets = design @ theta0 + rng.standard_normal(n)
    return RegressionInstance(design, targets, theta0, 1.0)


def test_instance_is_read_only():
    """实例中的数组不可写"""
    instance = _instance()
    assert instance.n == 6 and instance.d == 3
    assert instance.zeta == pytest.approx(0.5)
    with pytest.raises(ValueError):
        instance.design[0, 0] = 1.0


def test_instance_shape_and_finiteness():
    """维度不一致或含非有限值时报错"""
    with pytest.raises(ShapeError):
        RegressionInstance(np.zeros((4, 2)), np.zeros(3), np.zeros(2), 1.0)
    with pytest.raises(ShapeError):
        RegressionInstance(np.zeros((4, 2)), np.zeros(4), np.zeros(3), 1.0)
    with pytest.raises(DataError):
        RegressionInstance(np.full((4, 2), np.nan), np.zeros(4), np.zeros(2), 1.0)
    with pytest.raises(DomainError):
        RegressionInstance(np.zeros((4, 2)), np.zeros(4), np.zeros(2), 0.0)


def test_hyper_params():
    """β 必须为正，β = +inf 对应零温"""
    assert HyperParams(math.inf).is_zero_temperature
    assert HyperParams(math.inf).temperature == 0.0
    assert HyperParams(2.0).temperature == pytest.approx(0.5)
    with pytest.raises(DomainError):
        HyperParams(0.0)
    with pytest.raises(DomainError):
        HyperParams(1.0, eta=-1.0)


def test_noise_prior_densities():
    """Flat 先验密度恒为 0；Delta 先验没有密度"""
    assert NoisePrior.flat().log_density(3.0) == 0.0
    prior = NoisePrior.inverse_gamma(2.0, 1.0)
    # IG(2,1) 在 σ² = 1 处: log(1) − log Γ(2) − 3·log 1 − 1 = −1
    assert prior.log_density(1.0) == pytest.approx(-1.0)
    assert prior.log_density_derivative(1.0) == pytest.approx(-2.0)
    with pytest.raises(PriorError):
        NoisePrior.delta(1.0).log_density(1.0)
    with pytest.raises(DomainError):
        NoisePrior.delta(0.0)


def test_population_model_validation():
    """Σ 必须对称正定，ζ ∈ (0,1)"""
    model = PopulationModel.identity(3, 6)
    assert model.zeta == pytest.approx(0.5)
    np.testing.assert_allclose(model.eigenvalues, np.ones(3))
    with pytest.raises(DomainError):
        PopulationModel(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        PopulationModel(np.diag([1.0, -1.0]))
    with pytest.raises(DomainError):
        PopulationModel(np.eye(2), zeta=1.5)


def test_spectral_density_support():
    """三种谱密度的支撑集"""
    mp = SpectralDensity.marchenko_pastur(0.25)
    assert mp.support() == pytest.approx((0.25, 2.25))
    samples = SpectralDensity.from_samples([0.5, 0.2, 1.0])
    assert samples.support() == (0.2, 1.0)
    hist = SpectralDensity.from_histogram([0.0, 1.0, 2.0, 3.0], [0.0, 0.5, 0.5])
    assert hist.support() == (1.0, 3.0)
    with pytest.raises(DomainError):
        SpectralDensity.from_histogram([0.0, 1.0], [0.5])


def test_free_energy_breakdown_helmholtz():
    """F = E − T·S 不满足时拒绝构造"""
    breakdown = FreeEnergyBreakdown(1.0, 2.0, 2.0, 0.5)
    assert breakdown.helmholtz_defect == 0.0
    with pytest.raises(DomainError):
        FreeEnergyBreakdown(1.0, 2.0, 2.0, 1.0)


def test_ridge_system_matches_dense_algebra():
    """Cholesky 求解、对数行列式、迹与二次型与稠密计算一致"""
    instance = _instance(n=20, d=5, seed=3)
    system = RidgeSystem(instance.design, shift=0.3)
    matrix = instance.design.T @ instance.design + 0.3 * np.eye(5)
    inv = np.linalg.inv(matrix)

    np.testing.assert_allclose(system.estimate(instance.targets), inv @ instance.design.T @ instance.targets, rtol=1e-10)
    assert system.logdet() == pytest.approx(np.linalg.slogdet(matrix)[1], rel=1e-12)
    assert system.trace_inverse() == pytest.approx(np.trace(inv), rel=1e-10)
    t = instance.targets
    expected = t @ t - t @ instance.design @ inv @ instance.design.T @ t
    assert system.quadratic_form(t) == pytest.approx(expected, rel=1e-10)


def test_ridge_system_singular():
    """d > N 且无岭项时矩阵奇异"""
    design = np.random.default_rng(0).standard_normal((3, 5))
    with pytest.raises(SingularSystem):
        RidgeSystem(design)


def test_serialization_preserves_instance():
    """序列化后重建，数组逐位相等"""
    instance = _instance()
    rebuilt = from_dict(to_dict(instance))
    np.testing.assert_array_equal(rebuilt.design, instance.design)
    np.testing.assert_array_equal(rebuilt.targets, instance.targets)
    assert rebuilt.sigma0_sq == instance.sigma0_sq


def test_encode_float_and_hash():
    """非有限值编码为字符串；哈希与键顺序无关"""
    assert encode_float(math.inf) == "inf"
    assert encode_float(-math.inf) == "-inf"
    assert encode_float(math.nan) == "nan"
    assert encode_float(1.5) == 1.5
    assert canonical_hash({"a": 1, "b": 2}) == canonical_hash({"b": 2, "a": 1})
    with pytest.raises(DataError):
        to_dict(object())
