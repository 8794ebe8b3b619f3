"""
测试种子与数据生成
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent))

from src.core.exceptions import CovarianceNotPD, DomainError
from src.sampler import SeedSpec, StreamPurpose, sample_design, sample_instance, sample_theta0
from src.sampler.rng import UINT64_MAX


def test_seed_spec_is_reproducible():
    """相同 (master_seed, stream_index) 给出相同的随机数"""
    a = SeedSpec(7, 3).generator(StreamPurpose.NOISE).standard_normal(5)
    b = SeedSpec(7, 3).generator(StreamPurpose.NOISE).standard_normal(5)
    c = SeedSpec(7, 4).generator(StreamPurpose.NOISE).standard_normal(5)
    d = SeedSpec(7, 3).generator(StreamPurpose.DESIGN).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    assert not np.allclose(a, d)


def test_seed_spec_range():
    """种子必须是 64 位无符号整数"""
    SeedSpec(0, UINT64_MAX)
    with pytest.raises(DomainError):
        SeedSpec(-1)
    with pytest.raises(DomainError):
        SeedSpec(0, UINT64_MAX + 1)
    assert SeedSpec(5, 2).child(3) == SeedSpec(5, 5)


def test_design_scaling():
    """缩放约定下设计矩阵元素方差为 1/d"""
    n, d = 2000, 50
    design = sample_design(n, d, np.eye(d), True, SeedSpec(1))
    assert design.shape == (n, d)
    assert np.var(design) == pytest.approx(1.0 / d, rel=0.05)
    unscaled = sample_design(n, d, np.eye(d), False, SeedSpec(1))
    np.testing.assert_allclose(unscaled / math.sqrt(d), design, rtol=1e-14)


def test_design_covariance():
    """设计矩阵行的经验协方差接近 Σ"""
    sigma = np.array([[2.0, 0.5], [0.5, 1.0]])
    design = sample_design(20000, 2, sigma, False, SeedSpec(2))
    np.testing.assert_allclose(design.T @ design / 20000, sigma, atol=0.06)


def test_design_rejects_non_pd():
    """Σ 非正定时 Cholesky 失败"""
    with pytest.raises(CovarianceNotPD):
        sample_design(5, 2, np.array([[1.0, 2.0], [2.0, 1.0]]), False, SeedSpec(0))


def test_theta0_zero_prior_variance():
    """S² = 0 时 θ0 为零向量"""
    np.testing.assert_array_equal(sample_theta0(4, 0.0, SeedSpec(0)), np.zeros(4))
    theta = sample_theta0(4000, 2.0, SeedSpec(0))
    assert np.var(theta) == pytest.approx(2.0, rel=0.1)


def test_instance_noiseless_and_fixed_design():
    """无噪声时 t = Zθ0；给定设计矩阵时原样使用"""
    theta0 = np.ones(3)
    instance = sample_instance(10, 3, np.eye(3), 1.0, 0.0, SeedSpec(4), theta0=theta0, noiseless=True)
    np.testing.assert_allclose(instance.targets, instance.design @ theta0)
    np.testing.assert_allclose(instance.noise, np.zeros(10), atol=1e-14)

    design = instance.design
    again = sample_instance(10, 3, np.eye(3), 1.0, 0.0, SeedSpec(9), theta0=theta0, design=design)
    np.testing.assert_array_equal(again.design, design)
    assert again.scaled


def test_instance_noise_variance():
    """噪声 ε = t − Zθ0 的方差为 σ0²"""
    instance = sample_instance(20000, 2, np.eye(2), 0.5, 0.0, SeedSpec(11))
    assert np.var(instance.noise) == pytest.approx(0.5, rel=0.05)
