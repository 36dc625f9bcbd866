"""穷举搜索测试"""

import pytest

from krigdes.criteria.functionals import CriterionKind, evaluate_design
from krigdes.design.schemas import Design
from krigdes.search.exhaustive import enumerate_designs, exhaustive_optimal
from krigdes.search.schemas import Instance
from krigdes.utils.errors import CapacityError, DesignError


def _reflect(design, n_axis=4):
    """关于 x = 2.5 的镜像"""
    return tuple(sorted((n_axis - 1 - i // n_axis) * n_axis + i % n_axis for i in design))


class TestEnumerate:
    """枚举测试"""

    def test_count(self, ok_instance):
        """测试 4×4 格点 k=3 共 560 个设计"""
        designs = list(enumerate_designs(ok_instance, CriterionKind.V, 3))
        assert len(designs) == 560
        assert designs[0][0].indices == (0, 1, 2)

    def test_capacity(self, ok_instance):
        """测试超过穷举上限"""
        with pytest.raises(CapacityError):
            list(enumerate_designs(ok_instance, CriterionKind.GV, 3, cap=100))

    def test_invalid_k(self, ok_instance):
        """测试 k 越界"""
        with pytest.raises(DesignError):
            list(enumerate_designs(ok_instance, CriterionKind.GV, 16))

    def test_unidentifiable_yields_none(self, grid4, exp_model, uk_linear):
        """测试趋势不可识别的设计给出 None"""
        instance = Instance(cset=grid4, model=exp_model, variant=uk_linear)
        values = dict(enumerate_designs(instance, CriterionKind.GV, 3))
        assert values[Design((0, 1, 2))] is None
        assert values[Design((0, 3, 12))] is not None


class TestExhaustiveOptimal:
    """穷举最优测试"""

    @pytest.mark.parametrize("kind", [CriterionKind.GV, CriterionKind.G, CriterionKind.V, CriterionKind.MES])
    def test_optimal_and_ties(self, ok_instance, kind):
        """测试最优值、并列集合与字典序最小代表"""
        result = exhaustive_optimal(ok_instance, kind, 3)
        assert result.criterion_calls == 560
        assert result.method == "exhaustive"
        assert result.design.indices == result.ties[0]
        assert result.ties == sorted(result.ties)
        for other in result.ties[:3]:
            value = evaluate_design(ok_instance.cset, ok_instance.model, ok_instance.variant, Design(other), kind)
            assert value.loss == pytest.approx(result.criterion.loss, rel=1e-8, abs=1e-10)

    def test_symmetric_ties(self, ok_instance):
        """测试格点对称性：镜像设计也在并列集合中"""
        result = exhaustive_optimal(ok_instance, CriterionKind.GV, 3)
        for design in result.ties:
            assert _reflect(design) in result.ties

    def test_no_better_design(self, ok_instance):
        """测试任何设计都不优于最优值"""
        result = exhaustive_optimal(ok_instance, CriterionKind.V, 2)
        for design, value in enumerate_designs(ok_instance, CriterionKind.V, 2):
            assert value.loss >= result.criterion.loss - 1e-12
