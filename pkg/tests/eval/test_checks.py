"""oracle 校验与结果落盘测试"""

import json

import pandas as pd
import pytest

from eval.checks.aggregate import aggregate_study, write_study_outputs, write_validation_outputs
from eval.checks.oracles import (
    check_incr_decr_convergence,
    check_increment_argmax,
    check_m_independence,
    check_scale_invariance,
    check_sk_mes,
    check_update_equivalence,
    judge_incremental_efficiency,
    judge_study_efficiencies,
)
from eval.checks.report import render_study_report, render_validation_report
from krigdes.config.settings import StudyConfig
from krigdes.search.study import IncrementalStudyReport, run_incremental_study, run_study


class TestOracles:
    """oracle 校验测试"""

    def test_update_equivalence(self):
        """测试更新公式与直接计算一致"""
        result = check_update_equivalence(seed=0, instances=10)
        assert result["status"] == "pass"
        assert result["instances"] > 0

    def test_increment_argmax(self):
        """测试增量 argmax 与第二阶段最优一致"""
        result = check_increment_argmax(seed=1, instances=2)
        assert result["passed"]
        assert result["findings"] == []

    def test_sk_mes(self):
        """测试简单克里金下 GV 与 MES 等价"""
        result = check_sk_mes(seed=0)
        assert result["passed"]
        assert result["instances"] == 560

    def test_scale_invariance(self):
        """测试响应缩放不变性"""
        result = check_scale_invariance(seed=0, designs=2)
        assert result["passed"]

    def test_m_independence_value(self):
        """测试增量目标与预测点数无关"""
        result = check_m_independence(seed=0, m_small=50, m_large=500, repeats=2)
        assert result["max_error"] <= result["tolerance"]

    def test_incr_decr_convergence(self):
        """测试收敛检查在 4×4 与 5×5 两个实例上分别计数"""
        result = check_incr_decr_convergence(seed=0, seeds=2)
        assert result["mandatory"]
        assert result["instances"] == 4
        entries = result["detail"]["per_instance"]
        assert [e["instance"] for e in entries] == ["grid4_k4", "grid5_k4"]
        for entry in entries:
            assert entry["hit_rate"] == pytest.approx(entry["hits"] / 2)
            assert len(entry["optimum"]) == 4
        assert result["passed"] == all(e["hit_rate"] >= 0.99 for e in entries)


class TestThresholds:
    """效率门槛检查测试"""

    @pytest.fixture
    def study_report(self, ok_instance, fast_search):
        study = StudyConfig(kappas=[0.5, 1.5], phis=[1.0], design_size=3)
        return run_study(ok_instance, study, fast_search, method="exhaustive")

    @pytest.fixture
    def incremental_report(self, ok_instance, fast_search):
        study = StudyConfig(kappas=[0.5], phis=[1.0, 2.0], incremental_k_start=3, incremental_l=2)
        return run_incremental_study(ok_instance, study, fast_search)

    def test_study_values(self, study_report):
        """测试研究门槛读取 ξ_GV 的最小效率与全部效率的最大值"""
        result = judge_study_efficiencies(study_report)
        detail = result["detail"]
        gv_rows = [row for c in study_report.combos for row in c.efficiencies if row["design"] == "xi_GV"]
        expected_min = min(row[key] for row in gv_rows for key in ("E_GV", "E_G", "E_V"))
        assert detail["min_gv_design_efficiency"] == pytest.approx(expected_min)
        assert detail["max_efficiency"] == pytest.approx(1.0)
        assert detail["failed_combos"] == []
        assert result["passed"] == (expected_min >= 0.85)

    def test_study_floor(self, study_report):
        """测试门槛被突破时检查失败"""
        assert judge_study_efficiencies(study_report, floor=0.0)["passed"]
        failed = judge_study_efficiencies(study_report, floor=1.01)
        assert not failed["passed"]
        assert failed["status"] == "fail"

    def test_incremental_values(self, incremental_report):
        """测试增量门槛读取均值与中位数"""
        result = judge_incremental_efficiency(incremental_report)
        detail = result["detail"]
        assert detail["mean_efficiency"] == pytest.approx(incremental_report.mean_efficiency)
        assert detail["median_efficiency"] == pytest.approx(incremental_report.median_efficiency)
        assert len(detail["efficiencies"]) == 2
        assert judge_incremental_efficiency(incremental_report, mean_min=0.0, median_tol=1.0)["passed"]
        assert not judge_incremental_efficiency(incremental_report, mean_min=1.01)["passed"]

    def test_incremental_empty(self):
        """测试没有任何成功组合时检查失败"""
        empty = IncrementalStudyReport(combos=[], k_start=6, l=6, start_kind="plausible")
        result = judge_incremental_efficiency(empty)
        assert not result["passed"]
        assert result["detail"]["mean_efficiency"] is None


class TestOutputs:
    """结果落盘测试"""

    def test_validation_outputs(self, tmp_path):
        """测试校验汇总写出"""
        summary = {
            "run_id": "r",
            "tool_version": "0.1.0",
            "seed": 0,
            "passed": False,
            "checks": [
                {"name": "a", "mandatory": True, "status": "pass", "passed": True, "max_error": 1e-12, "elapsed": 0.1},
                {"name": "b", "mandatory": True, "status": "fail", "passed": False, "max_error": 0.5, "elapsed": 0.2},
            ],
            "counters": {"total": 2, "failed": 1, "findings": 0},
        }
        paths = write_validation_outputs(str(tmp_path), summary)
        table = pd.read_csv(paths["checks"])
        assert list(table["status"]) == ["pass", "fail"]
        assert json.loads(paths["summary"].read_text(encoding="utf-8"))["passed"] is False
        text = render_validation_report(summary)
        assert "**FAIL**" in text

    def test_study_outputs(self, tmp_path, ok_instance, fast_search):
        """测试研究结果目录"""
        study = StudyConfig(kappas=[0.5], phis=[1.0], design_size=3)
        report = run_study(ok_instance, study, fast_search, method="exhaustive")
        summary = aggregate_study(report, seed=0)
        paths = write_study_outputs(str(tmp_path), report, summary, {"study": {}})
        assert set(paths) == {"summary", "combos", "efficiency_long", "efficiency_table"}
        table = pd.read_csv(paths["efficiency_table"])
        assert list(table["design"]) == ["xi_GV", "xi_G", "xi_V"]
        assert "xi_GV" in render_study_report(summary)
