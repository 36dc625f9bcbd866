"""候选集与设计空间测试"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from krigdes.design.schemas import CandidateSet, Design, TrendBasis
from krigdes.design.space import (
    basis_matrix,
    complement,
    ids_to_indices,
    load_candidates,
    make_grid,
    neighbor_table,
    plausible_start,
)
from krigdes.utils.errors import CandidateParseError, CapacityError, DesignError, TrendError


class TestMakeGrid:
    """规则格点测试"""

    def test_study_grid(self):
        """测试 17×17 格点"""
        cset = make_grid(17, 2, spacing=1.0)
        assert cset.n == 289
        assert cset.dim == 2
        assert_allclose(cset.coords.min(axis=0), [1.0, 1.0])
        assert_allclose(cset.coords.max(axis=0), [17.0, 17.0])
        assert cset.spacing == pytest.approx(1.0)

    def test_half_spacing(self):
        """测试 33×33、间距 0.5 的格点"""
        cset = make_grid(33, 2, spacing=0.5)
        assert cset.n == 1089
        assert cset.coords.max() == pytest.approx(16.5)
        assert cset.coords.min() == pytest.approx(0.5)

    def test_minimal(self):
        """测试最小格点"""
        cset = make_grid(2, 1)
        assert cset.n == 2
        assert_allclose(cset.coords.ravel(), [1.0, 2.0])

    def test_row_major(self, grid4):
        """测试第一个坐标变化最慢"""
        assert_allclose(grid4.coords[0], [1, 1])
        assert_allclose(grid4.coords[1], [1, 2])
        assert_allclose(grid4.coords[4], [2, 1])
        assert list(grid4.ids[:3]) == [0, 1, 2]

    def test_invalid(self):
        """测试非法参数"""
        with pytest.raises(ValueError):
            make_grid(1, 2)
        with pytest.raises(ValueError):
            make_grid(3, 0)
        with pytest.raises(ValueError):
            make_grid(3, 2, spacing=0)

    def test_capacity(self):
        """测试超过容量上限"""
        with pytest.raises(CapacityError):
            make_grid(10, 3, max_points=999)


class TestDesign:
    """设计对象测试"""

    def test_sorted(self):
        """测试自动排序"""
        assert Design.of([5, 1, 3], 10).indices == (1, 3, 5)

    def test_duplicate(self):
        """测试重复点"""
        with pytest.raises(DesignError):
            Design.of([1, 1], 10)

    def test_size_bounds(self):
        """测试 k 必须在 [1, N-1] 内"""
        with pytest.raises(DesignError):
            Design.of([], 4)
        with pytest.raises(DesignError):
            Design.of([0, 1, 2, 3], 4)
        with pytest.raises(DesignError):
            Design.of([7], 4)

    def test_candidate_set_checks(self):
        """测试候选集校验"""
        with pytest.raises(DesignError):
            CandidateSet(ids=np.array([0]), coords=np.array([[0.0]]))
        with pytest.raises(DesignError):
            CandidateSet(ids=np.array([1, 1]), coords=np.array([[0.0], [1.0]]))


class TestBasis:
    """趋势基函数测试"""

    def test_linear_row(self, grid4):
        """测试线性趋势 (1, x, y)"""
        F = basis_matrix(TrendBasis.from_name("linear"), grid4, [1])
        assert_allclose(F, [[1, 1, 2]])

    def test_quadratic_row(self, grid4):
        """测试二次趋势 (1, x, y, x², y², xy)"""
        F = basis_matrix(TrendBasis.from_name("quadratic"), grid4, [6])
        assert_allclose(F, [[1, 2, 3, 4, 9, 6]])

    def test_monomials(self, grid4):
        """测试自定义单项式"""
        basis = TrendBasis.from_name("monomials", monomials=[[0, 0], [2, 1]])
        F = basis_matrix(basis, grid4, [6])
        assert_allclose(F, [[1, 12]])
        assert basis.p(2) == 2

    def test_external_drift(self):
        """测试外部漂移"""
        cset = CandidateSet(
            ids=np.array([10, 20, 30]),
            coords=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            covariates={"elevation": np.array([5.0, 6.0, 7.0])},
        )
        basis = TrendBasis.from_name("external_drift", covariate="elevation")
        assert_allclose(basis_matrix(basis, cset, [2, 0]), [[1, 7], [1, 5]])
        assert basis.p(2) == 2
        with pytest.raises(TrendError):
            basis_matrix(TrendBasis.from_name("external_drift", covariate="slope"), cset, [0])

    def test_unknown_kind(self):
        """测试未知趋势类型"""
        with pytest.raises(TrendError):
            TrendBasis.from_name("cubic")
        with pytest.raises(TrendError):
            TrendBasis.from_name("external_drift")


class TestSetOperations:
    """集合运算测试"""

    def test_complement(self):
        """测试非设计点升序"""
        assert complement(Design((1, 3)), 5) == [0, 2, 4]
        assert complement([4, 0], 5) == [1, 2, 3]

    def test_ids_to_indices(self):
        """测试 id 映射"""
        cset = CandidateSet(ids=np.array([7, 3, 9]), coords=np.array([[0.0], [1.0], [2.0]]))
        assert ids_to_indices(cset, [9, 7]) == [2, 0]
        with pytest.raises(DesignError):
            ids_to_indices(cset, [4])

    def test_plausible_start_corners(self, grid4):
        """测试合理起点先取角点"""
        design = plausible_start(grid4, 4)
        assert design.indices == (0, 3, 12, 15)

    def test_plausible_start_fill(self, grid5):
        """测试补足到 k 个不同点"""
        design = plausible_start(grid5, 9)
        assert design.k == 9

    def test_neighbor_table_grid(self, grid4):
        """测试格点邻域（2 个格距以内）"""
        table = neighbor_table(grid4)
        # 角点 (1,1)：距离 <= 2 的点有 (1,2),(1,3),(2,1),(2,2),(3,1)
        assert sorted(table[0].tolist()) == [1, 2, 4, 5, 8]
        assert 0 not in table[0]


class TestLoadCandidates:
    """候选点 CSV 读取测试"""

    def _write(self, tmp_path, text):
        path = tmp_path / "cands.csv"
        path.write_text(text, encoding="utf-8")
        return path

    def test_valid(self, tmp_path):
        """测试正常读取与协变量"""
        path = self._write(tmp_path, "id,x,y,elevation\n5,0,0,10\n8,1,0,11\n2,0,1,12\n")
        cset = load_candidates(path)
        assert list(cset.ids) == [5, 8, 2]
        assert cset.dim == 2
        assert cset.covariate_names == ["elevation"]
        assert_allclose(cset.covariates["elevation"], [10, 11, 12])

    def test_duplicate_id(self, tmp_path):
        """测试重复 id 报告行号"""
        path = self._write(tmp_path, "id,x1,x2\n1,0,0\n2,1,0\n1,0,1\n")
        with pytest.raises(CandidateParseError) as exc:
            load_candidates(path)
        assert "duplicate id" in str(exc.value)
        assert exc.value.line == 4

    def test_non_integer_id(self, tmp_path):
        """测试非整数 id"""
        path = self._write(tmp_path, "id,x1\n1,0\n2.5,1\n")
        with pytest.raises(CandidateParseError) as exc:
            load_candidates(path)
        assert "non-integer id" in str(exc.value)
        assert exc.value.line == 3

    def test_non_numeric_coordinate(self, tmp_path):
        """测试非数值坐标"""
        path = self._write(tmp_path, "id,x,y\n1,0,0\n2,abc,1\n")
        with pytest.raises(CandidateParseError) as exc:
            load_candidates(path)
        assert "non-numeric coordinate" in str(exc.value)

    def test_short_row(self, tmp_path):
        """测试字段数不足"""
        path = self._write(tmp_path, "id,x,y\n1,0,0\n2,1\n")
        with pytest.raises(CandidateParseError) as exc:
            load_candidates(path)
        assert "inconsistent column count" in str(exc.value)
        assert exc.value.line == 3

    def test_missing_file(self, tmp_path):
        """测试文件不存在"""
        with pytest.raises(CandidateParseError):
            load_candidates(tmp_path / "none.csv")

    def test_capacity(self, tmp_path):
        """测试容量上限"""
        rows = "".join(f"{i},{i}\n" for i in range(5))
        path = self._write(tmp_path, "id,x\n" + rows)
        with pytest.raises(CapacityError):
            load_candidates(path, max_points=4)
