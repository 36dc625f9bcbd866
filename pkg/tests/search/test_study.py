"""参数研究测试"""

from dataclasses import replace

import pytest

from krigdes.config.settings import StudyConfig
from krigdes.criteria.functionals import CriterionKind, evaluate_design
from krigdes.design.schemas import Design
from krigdes.search.study import (
    combo_instance,
    design_name,
    run_incremental_study,
    run_study,
    study_combos,
)


class TestCombos:
    """参数组合测试"""

    def test_default_grid(self):
        """测试默认 6×9 = 54 个组合，κ 在外层"""
        combos = study_combos(StudyConfig())
        assert len(combos) == 54
        assert combos[0] == (0.25, 0.1)
        assert combos[9] == (0.5, 0.1)

    def test_truncate(self):
        """测试组合数截断"""
        assert len(study_combos(StudyConfig(max_combos=5))) == 5

    def test_design_name(self):
        assert design_name(CriterionKind.GV) == "xi_GV"


class TestRunStudy:
    """参数研究运行测试"""

    def test_exhaustive_study(self, ok_instance, fast_search):
        """测试穷举研究的交叉效率对角线为1"""
        study = StudyConfig(kappas=[0.5, 1.5], phis=[1.0], design_size=3)
        report = run_study(ok_instance, study, fast_search, method="exhaustive")
        assert len(report.succeeded) == 2
        for combo in report.combos:
            rows = {row["design"]: row for row in combo.efficiencies}
            for label in ("GV", "G", "V"):
                assert rows[f"xi_{label}"][f"E_{label}"] == pytest.approx(1.0)
                assert all(row[f"E_{label}"] <= 1.0 + 1e-9 for row in rows.values())
        table = report.average_table()
        assert list(table["design"]) == ["xi_GV", "xi_G", "xi_V"]
        assert set(report.call_medians()) == {"gv", "g", "v"}
        assert report.to_dict()["failed_combos"] == []

    def test_unit_scaling(self, ok_instance, fast_search):
        """测试单位 GV 缩放不改变效率"""
        study = StudyConfig(kappas=[1.0], phis=[0.75], design_size=3)
        plain = run_study(ok_instance, study, fast_search, method="exhaustive")
        scaled_cfg = StudyConfig(kappas=[1.0], phis=[0.75], design_size=3, scale_unit_gv=True)
        scaled = run_study(ok_instance, scaled_cfg, fast_search, method="exhaustive")
        combo = scaled.combos[0]
        assert combo.unit_gv_scale is not None
        assert combo.values["xi_GV"]["gv"] == pytest.approx(0.0, abs=1e-8)
        for a, b in zip(plain.combos[0].efficiencies, combo.efficiencies):
            assert a["E_V"] == pytest.approx(b["E_V"])

    def test_threads_match(self, ok_instance, fast_search):
        """测试多线程与串行结果一致"""
        study = StudyConfig(kappas=[0.5, 2.0], phis=[0.5, 1.0], design_size=3, criteria=["gv"])
        serial = run_study(ok_instance, study, fast_search)
        threaded = run_study(ok_instance, study, replace(fast_search, workers=3))
        assert [c.designs for c in serial.combos] == [c.designs for c in threaded.combos]


class TestIncrementalStudy:
    """单次增量效率研究测试"""

    def test_efficiency_bounded(self, ok_instance, fast_search):
        """测试效率不超过1"""
        study = StudyConfig(kappas=[0.5], phis=[1.0, 2.0], incremental_k_start=3, incremental_l=2)
        report = run_incremental_study(ok_instance, study, fast_search)
        assert len(report.efficiencies) == 2
        assert all(0 < e <= 1.0 + 1e-9 for e in report.efficiencies)
        assert report.to_dict()["mean_efficiency"] == pytest.approx(report.mean_efficiency)
        assert len(report.frame()) == 2

    def test_keeps_anisotropy(self, ok_instance, fast_search):
        """测试增量研究沿用基础模型的各向异性"""
        aniso = replace(ok_instance.model, aniso_angle=0.3, aniso_ratio=2.5)
        base = ok_instance.with_model(aniso)
        study = StudyConfig(kappas=[1.5], phis=[2.0], incremental_k_start=3, incremental_l=2)
        combo = run_incremental_study(base, study, fast_search).combos[0]
        assert combo.error is None

        model = replace(aniso, kappa=1.5, phi=2.0)
        enlarged = Design.of(combo.start + combo.increment, base.cset.n)
        expected = evaluate_design(base.cset, model, base.variant, enlarged, CriterionKind.GV)
        assert combo.incremental_logdet == pytest.approx(expected.value)

        isotropic = replace(model, aniso_angle=None, aniso_ratio=None)
        flat = evaluate_design(base.cset, isotropic, base.variant, enlarged, CriterionKind.GV)
        assert combo.incremental_logdet != pytest.approx(flat.value)


class TestComboInstance:
    """组合模型测试"""

    def test_only_range_and_smoothness_change(self, ok_instance):
        """测试只替换 κ、φ"""
        base = ok_instance.with_model(replace(ok_instance.model, nugget=0.1, aniso_angle=0.5, aniso_ratio=2.0))
        model = combo_instance(base, kappa=2.5, phi=3.0).model
        assert (model.kappa, model.phi) == (2.5, 3.0)
        assert (model.nugget, model.aniso_angle, model.aniso_ratio) == (0.1, 0.5, 2.0)
