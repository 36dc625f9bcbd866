"""设计准则测试"""

import math

import numpy as np
import pytest

from krigdes.criteria.functionals import (
    CriterionKind,
    CriterionValue,
    cross_efficiency,
    evaluate_design,
    g_value,
    gv_relative,
    gv_value,
    relative_efficiency,
    scale_to_unit_gv,
    v_value,
)
from krigdes.design.schemas import Design
from krigdes.kriging.system import build_system
from krigdes.utils.errors import ConfigError, CriterionMismatchError, DesignError


class TestCriterionKind:
    """准则类型测试"""

    def test_from_name(self):
        """测试大小写与空白"""
        assert CriterionKind.from_name(" GV ") is CriterionKind.GV
        assert CriterionKind.from_name("mes").maximize

    def test_unknown(self):
        """测试未知准则"""
        with pytest.raises(ConfigError):
            CriterionKind.from_name("d")


class TestValues:
    """准则值测试"""

    def test_gv_diag(self):
        """测试 diag(1, 4) 的 GV 为 log 4"""
        value = gv_value(np.diag([1.0, 4.0]), scale=1.0)
        assert value.value == pytest.approx(math.log(4.0))
        assert value.m == 2
        assert value.per_point == pytest.approx(2.0)

    def test_gv_singular(self):
        """测试奇异 Σ 给出 -inf 哨兵"""
        value = gv_value(np.ones((2, 2)), scale=1.0)
        assert value.singular
        assert value.value == -math.inf
        assert value.per_point == 0.0

    def test_g_and_v(self):
        """测试 G 取最大，V 取平均"""
        variances = [0.3, 0.7, 0.4]
        assert g_value(variances).value == pytest.approx(0.7)
        assert v_value(variances).value == pytest.approx(0.466667, abs=1e-6)

    def test_mes_loss(self):
        """测试 MES 的损失取负"""
        value = CriterionValue(CriterionKind.MES, 2.5, m=3)
        assert value.loss == -2.5
        assert value.per_point is None


class TestEfficiency:
    """相对效率测试"""

    def test_gv(self):
        """测试 GV 效率 exp(0.5·差)"""
        opt = CriterionValue(CriterionKind.GV, 0.0, m=5)
        other = CriterionValue(CriterionKind.GV, 2.0, m=5)
        assert relative_efficiency(opt, other) == pytest.approx(math.exp(-1))
        assert relative_efficiency(opt, opt) == 1.0

    def test_mes(self):
        """测试 MES 为最大化准则"""
        opt = CriterionValue(CriterionKind.MES, 3.0, m=4)
        other = CriterionValue(CriterionKind.MES, 1.0, m=4)
        assert relative_efficiency(opt, other) == pytest.approx(math.exp(-1))

    def test_g_ratio(self):
        """测试 G 效率为比值"""
        opt = CriterionValue(CriterionKind.G, 0.5, m=3)
        other = CriterionValue(CriterionKind.G, 1.0, m=3)
        assert relative_efficiency(opt, other) == pytest.approx(0.5)

    def test_mismatch(self):
        """测试准则或 m 不一致"""
        with pytest.raises(CriterionMismatchError):
            relative_efficiency(CriterionValue(CriterionKind.G, 1.0, m=3), CriterionValue(CriterionKind.V, 1.0, m=3))
        with pytest.raises(CriterionMismatchError):
            relative_efficiency(CriterionValue(CriterionKind.G, 1.0, m=3), CriterionValue(CriterionKind.G, 1.0, m=4))

    def test_degenerate_design_rejected(self):
        """测试奇异设计不会给出大于1的效率"""
        opt = CriterionValue(CriterionKind.GV, 0.0, m=5)
        singular = CriterionValue(CriterionKind.GV, -math.inf, m=5)
        with pytest.raises(DesignError):
            relative_efficiency(opt, singular)
        assert relative_efficiency(singular, opt) == 0.0
        assert relative_efficiency(singular, singular) == 1.0
        with pytest.raises(DesignError):
            relative_efficiency(CriterionValue(CriterionKind.V, 0.3, m=3), CriterionValue(CriterionKind.V, 0.0, m=3))
        with pytest.raises(DesignError):
            relative_efficiency(CriterionValue(CriterionKind.MES, -math.inf, m=3), CriterionValue(CriterionKind.MES, 1.0, m=3))

    def test_scale_to_unit(self):
        """测试缩放后 |Σ| = 1"""
        s2 = scale_to_unit_gv(-12.0, 6)
        assert -12.0 + 6 * math.log(s2) == pytest.approx(0.0)

    def test_cross_efficiency_diagonal(self):
        """测试每个准则的最优设计在该列效率为1"""
        values = {
            "a": {CriterionKind.GV: CriterionValue(CriterionKind.GV, 1.0, m=2),
                  CriterionKind.V: CriterionValue(CriterionKind.V, 0.8, m=2)},
            "b": {CriterionKind.GV: CriterionValue(CriterionKind.GV, 2.0, m=2),
                  CriterionKind.V: CriterionValue(CriterionKind.V, 0.4, m=2)},
        }
        rows = {row["design"]: row for row in cross_efficiency(values)}
        assert rows["a"]["E_GV"] == 1.0
        assert rows["b"]["E_V"] == 1.0
        assert rows["a"]["E_V"] == pytest.approx(0.5)
        assert rows["b"]["E_GV"] == pytest.approx(math.exp(-0.5))
        assert "E_G" not in rows["a"]


class TestDesignEvaluation:
    """设计准则计算测试"""

    def test_gv_relative_differences(self, grid4, smooth_model, uk_linear):
        """测试 m 无关等价量的差等于 log|Σ| 的差"""
        first = Design((0, 3, 12, 15, 6))
        second = Design((1, 7, 8, 14, 10))
        sys_a = build_system(grid4, first, smooth_model, uk_linear)
        sys_b = build_system(grid4, second, smooth_model, uk_linear)
        full_a = evaluate_design(grid4, smooth_model, uk_linear, first, CriterionKind.GV).value
        full_b = evaluate_design(grid4, smooth_model, uk_linear, second, CriterionKind.GV).value
        assert gv_relative(sys_a) - gv_relative(sys_b) == pytest.approx(full_a - full_b, abs=1e-7)

    def test_targets_subset(self, grid4, exp_model, ok):
        """测试指定预测点"""
        design = Design((0, 15))
        value = evaluate_design(grid4, exp_model, ok, design, CriterionKind.V, targets=[5, 10])
        assert value.m == 2
        assert value.value > 0

    def test_mes_value(self, grid4, exp_model, sk):
        """测试 MES 即 log|C_ξ|"""
        design = Design((0, 15))
        value = evaluate_design(grid4, exp_model, sk, design, CriterionKind.MES)
        rho = math.exp(-math.sqrt(18))
        assert value.value == pytest.approx(math.log(1 - rho ** 2))
