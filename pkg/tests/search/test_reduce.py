"""监测网络逐点缩减测试"""

import math

import numpy as np
import pytest

from krigdes.criteria.functionals import CriterionKind, evaluate_design
from krigdes.design.schemas import CandidateSet, Design, TrendBasis
from krigdes.incremental.update import stage_state
from krigdes.kriging.covariance import CovModel
from krigdes.kriging.system import KrigingVariant
from krigdes.search.reduce import AUDIT_TOL, best_removal, station_reduce
from krigdes.search.schemas import Instance
from krigdes.utils.errors import DesignError
from krigdes.utils.helpers import is_tie


@pytest.fixture
def instance(grid5, exp_model, ok):
    return Instance(cset=grid5, model=exp_model, variant=ok)


@pytest.fixture
def network():
    return Design((0, 2, 4, 6, 8, 12, 16, 18, 20, 24))


def _gv(instance, design):
    return evaluate_design(instance.cset, instance.model, instance.variant, design, CriterionKind.GV).value


class TestBestRemoval:
    """最优移除点测试"""

    def test_matches_full_recompute(self, instance, network):
        """测试移除点使完整重算的 log|Σ| 最小"""
        state = stage_state(instance.cset, network, instance.model, instance.variant, track_logdet=True)
        removed, gain = best_removal(state)
        full = {a: _gv(instance, Design(tuple(i for i in network if i != a))) for a in network}
        best = min(full.values())
        assert is_tie(full[removed], best, tol=1e-8)
        assert state.logdet_d + gain == pytest.approx(full[removed], abs=1e-7)


class TestStationReduce:
    """逐点缩减测试"""

    def test_trajectory_without_refine(self, instance, network):
        """测试不精修时的轨迹与完整重算一致"""
        report = station_reduce(instance, network, removals=3, refine=False)
        assert [s.k for s in report.steps] == [9, 8, 7]
        assert report.final_design.k == 7
        assert report.baseline_logdet == pytest.approx(_gv(instance, network), abs=1e-8)
        for step in report.steps:
            assert step.m == instance.cset.n - step.k
            assert step.logdet == pytest.approx(_gv(instance, Design(tuple(step.design))), abs=1e-6)
            assert not step.swapped

    def test_refine_audits(self, instance, network, fast_search):
        """测试精修后的记账通过审计"""
        report = station_reduce(instance, network, removals=4, config=fast_search)
        assert len(report.audits) == 3
        for audit in report.audits:
            assert audit["abs_error"] <= AUDIT_TOL * max(1.0, abs(audit["audited"]))
        final = report.steps[-1]
        assert final.logdet == pytest.approx(_gv(instance, report.final_design), abs=1e-6)

    def test_first_exceeds(self, instance, network):
        """测试首次超过基线的 k"""
        report = station_reduce(instance, network, removals=5, refine=False)
        exceeding = [s.k for s in report.steps if s.logdet > report.baseline_logdet]
        assert report.first_exceeds_k == (exceeding[0] if exceeding else None)

    def test_to_dict(self, instance, network):
        """测试报告导出"""
        report = station_reduce(instance, network, removals=1, refine=False)
        out = report.to_dict(instance.cset)
        assert set(out) >= {"baseline", "trajectory", "final_design", "first_exceeds_k", "audits", "final_design_ids"}
        assert out["trajectory"][0]["per_point"] == pytest.approx(math.exp(report.steps[0].logdet / report.steps[0].m))

    def test_refuses_below_k_min(self, instance, network):
        """测试 k_min 与移除数的检查"""
        with pytest.raises(DesignError):
            station_reduce(instance, network, k_min=1)
        with pytest.raises(DesignError):
            station_reduce(instance, network, removals=9)
        with pytest.raises(DesignError):
            station_reduce(instance, network, removals=0)

    def test_external_drift(self):
        """测试外部漂移趋势下的缩减"""
        rng = np.random.default_rng(7)
        coords = rng.uniform(0, 10, size=(30, 2))
        cset = CandidateSet(
            ids=np.arange(100, 130),
            coords=coords,
            covariates={"elevation": coords[:, 0] * 0.5 + rng.normal(0, 1, 30)},
        )
        variant = KrigingVariant.universal(TrendBasis.from_name("external_drift", covariate="elevation"))
        model = CovModel(sigma2=1.0, phi=3.0, kappa=0.5, nugget=0.05)
        inst = Instance(cset=cset, model=model, variant=variant)
        design = Design(tuple(range(0, 30, 3)))
        report = station_reduce(inst, design, removals=3, refine=False)
        assert report.final_design.k == 7
        assert report.steps[-1].logdet == pytest.approx(_gv(inst, report.final_design), abs=1e-6)
        assert report.to_dict(cset)["final_design_ids"] == [int(cset.ids[i]) for i in report.final_design]
