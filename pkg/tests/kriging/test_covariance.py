"""Matérn 协方差测试"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate, special

from krigdes.design.schemas import CandidateSet
from krigdes.kriging.covariance import CovModel, cov_matrix, effective_distance, matern_corr


def _bessel_k_quad(kappa, u):
    """K_κ(u) = ∫_0^∞ exp(-u cosh t) cosh(κ t) dt"""
    value, _ = integrate.quad(lambda t: math.exp(-u * math.cosh(t)) * math.cosh(kappa * t), 0, 50)
    return value


class TestMaternCorr:
    """Matérn 相关函数测试"""

    def test_exponential(self):
        """测试 κ=0.5 即指数相关"""
        assert matern_corr(1.0, 1.0, 0.5) == pytest.approx(0.3678794, abs=1e-7)

    def test_kappa_three_halves(self):
        """测试 κ=1.5 闭式 (1+u)e^{-u}"""
        assert matern_corr(1.0, 1.0, 1.5) == pytest.approx(0.7357589, abs=1e-7)

    def test_kappa_five_halves(self):
        """测试 κ=2.5 闭式 (1+u+u²/3)e^{-u}"""
        h = np.array([0.3, 1.0, 4.0])
        expected = (1 + h + h ** 2 / 3) * np.exp(-h)
        assert_allclose(matern_corr(h, 1.0, 2.5), expected, rtol=1e-10)

    def test_zero_distance(self):
        """测试 ρ(0) = 1"""
        assert matern_corr(0.0, 2.0, 1.0) == 1.0
        assert_allclose(matern_corr(np.zeros(3), 1.0, 3.0), np.ones(3))

    @pytest.mark.parametrize("kappa", [0.7, 1.0, 2.0, 3.3])
    def test_against_quadrature(self, kappa):
        """测试与数值积分得到的 Bessel 函数一致"""
        for u in (0.2, 1.0, 3.0):
            expected = 2 ** (1 - kappa) / special.gamma(kappa) * u ** kappa * _bessel_k_quad(kappa, u)
            assert matern_corr(u, 1.0, kappa) == pytest.approx(expected, rel=1e-7)

    def test_large_distance_no_nan(self):
        """测试大距离下溢为有限值"""
        value = matern_corr(1e4, 1.0, 3.0)
        assert 0.0 <= value < 1e-100

    def test_monotone(self):
        """测试随距离单调不增"""
        rho = matern_corr(np.linspace(0, 10, 200), 1.5, 1.7)
        assert np.all(np.diff(rho) <= 1e-15)

    def test_invalid_input(self):
        """测试非法输入"""
        with pytest.raises(ValueError):
            matern_corr(-1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            matern_corr(np.inf, 1.0, 0.5)


class TestCovModel:
    """协方差模型测试"""

    def test_validation(self):
        """测试参数校验"""
        with pytest.raises(ValueError):
            CovModel(sigma2=0.0)
        with pytest.raises(ValueError):
            CovModel(phi=-1.0)
        with pytest.raises(ValueError):
            CovModel(nugget=-0.1)
        with pytest.raises(ValueError):
            CovModel(aniso_ratio=0.5)

    def test_scaled(self):
        """测试响应缩放"""
        model = CovModel(sigma2=2.0, nugget=0.5).scaled(3.0)
        assert model.sigma2 == pytest.approx(18.0)
        assert model.nugget == pytest.approx(4.5)
        assert model.sill == pytest.approx(22.5)


class TestAnisotropy:
    """几何各向异性测试"""

    def test_ratio_shrinks_second_axis(self):
        """测试 ψ_A=0, ψ_R=2 时第二轴距离减半"""
        assert effective_distance([0, 0], [0, 1], angle=0.0, ratio=2.0) == pytest.approx(0.5)
        assert effective_distance([0, 0], [1, 0], angle=0.0, ratio=2.0) == pytest.approx(1.0)

    def test_rotation(self):
        """测试旋转 π/2 后主轴互换"""
        assert effective_distance([0, 0], [0, 1], angle=math.pi / 2, ratio=2.0) == pytest.approx(1.0)
        assert effective_distance([0, 0], [1, 0], angle=math.pi / 2, ratio=2.0) == pytest.approx(0.5)

    def test_isotropic(self):
        """测试无各向异性即欧氏距离"""
        assert effective_distance([0, 0], [3, 4]) == pytest.approx(5.0)

    def test_dimension_check(self):
        """测试非二维拒绝各向异性"""
        with pytest.raises(ValueError):
            effective_distance([0, 0, 0], [1, 1, 1], angle=0.0, ratio=2.0)


class TestCovMatrix:
    """协方差矩阵测试"""

    def test_nugget_on_diagonal(self):
        """测试块金只加在同一点上"""
        cset = CandidateSet(ids=np.array([0, 1]), coords=np.array([[0.0], [1.0]]))
        model = CovModel(sigma2=2.0, phi=1.0, kappa=0.5, nugget=0.3)
        C = cov_matrix(model, cset, [0, 1], [0, 1])
        assert_allclose(C, [[2.3, 2 * math.exp(-1)], [2 * math.exp(-1), 2.3]])
        cross = cov_matrix(model, cset, [0], [1])
        assert_allclose(cross, [[2 * math.exp(-1)]])

    def test_symmetric_psd(self, grid4, smooth_model):
        """测试对称半正定"""
        idx = list(range(grid4.n))
        C = cov_matrix(smooth_model, grid4, idx, idx)
        assert_allclose(C, C.T)
        assert np.linalg.eigvalsh(C).min() > -1e-10

    def test_empty(self, grid4, exp_model):
        """测试空下标"""
        assert cov_matrix(exp_model, grid4, [], [0, 1]).shape == (0, 2)
