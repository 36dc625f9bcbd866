"""监测网络逐点缩减：每步移除使 GV 损失最小的点，再做交换精修"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from krigdes.config.settings import SearchSettings
from krigdes.criteria.functionals import CriterionKind, evaluate_design
from krigdes.design.schemas import CandidateSet, Design
from krigdes.incremental.update import StageState, advance, decrement_logdet, stage_state
from krigdes.kriging.system import build_system
from krigdes.search.anneal import steepest_swaps
from krigdes.search.objective import CriterionCounter, DesignObjective
from krigdes.search.schemas import Instance
from krigdes.utils.errors import DesignError, NumericalError, TrendError
from krigdes.utils.helpers import is_tie

logger = logging.getLogger(__name__)

AUDIT_TOL = 1e-6


@dataclass
class ReductionStep:
    """一次移除（及精修）之后的状态"""
    k: int
    removed: int
    swapped: bool
    logdet: float
    m: int
    exceeds_baseline: bool
    design: List[int] = field(default_factory=list)

    @property
    def per_point(self) -> float:
        return math.exp(self.logdet / self.m)


@dataclass
class ReductionReport:
    """逐点缩减报告"""
    baseline_k: int
    baseline_logdet: float
    steps: List[ReductionStep]
    final_design: Design
    first_exceeds_k: Optional[int]
    criterion_calls: int
    elapsed: float
    audits: List[Dict[str, float]] = field(default_factory=list)

    def to_dict(self, cset: Optional[CandidateSet] = None) -> Dict[str, Any]:
        steps = []
        for s in self.steps:
            row = {
                "k": s.k,
                "removed": s.removed,
                "swapped": s.swapped,
                "logdet": s.logdet,
                "per_point": s.per_point,
                "exceeds_baseline": s.exceeds_baseline,
                "design": s.design,
            }
            if cset is not None:
                row["removed_id"] = int(cset.ids[s.removed])
            steps.append(row)
        out = {
            "baseline": {"k": self.baseline_k, "logdet": self.baseline_logdet},
            "trajectory": steps,
            "final_design": self.final_design.as_list(),
            "first_exceeds_k": self.first_exceeds_k,
            "criterion_calls": self.criterion_calls,
            "elapsed": self.elapsed,
            "audits": self.audits,
        }
        if cset is not None:
            out["final_design_ids"] = [int(cset.ids[i]) for i in self.final_design]
        return out


def best_removal(state: StageState, counter: Optional[CriterionCounter] = None) -> tuple:
    """
    使 log|Σ| 增加最少的移除点

    移除 a 后 log|Σ| 增加 log σ²_{ξ∖a}(a)，即 a 在缩减设计上的克里金方差；并列取下标最小者。

    Returns:
        (点下标, log 方差)
    """
    cset, model, variant = state.cset, state.model, state.variant
    best, best_gain = None, math.inf
    for a in state.design.indices:
        reduced = Design(tuple(i for i in state.design.indices if i != a))
        if counter is not None:
            counter.tick()
        try:
            system = build_system(cset, reduced, model, variant)
        except (TrendError, NumericalError):
            continue
        gain = decrement_logdet(system, [a])
        if best is None or (gain < best_gain and not is_tie(gain, best_gain)):
            best, best_gain = a, gain
    if best is None:
        raise TrendError(f"设计 {state.design.as_list()} 移除任一点后趋势都不可识别")
    return best, best_gain


def _audit_points(steps: int) -> List[int]:
    return sorted({0, steps // 2, steps - 1})


def station_reduce(
    instance: Instance,
    design: Design,
    removals: Optional[int] = None,
    k_min: Optional[int] = None,
    config: Optional[SearchSettings] = None,
    refine: bool = True,
) -> ReductionReport:
    """
    逐点缩减

    log|Σ| 只在起点完整计算一次；之后移除按减量块记账，交换精修按与 m 无关的 GV 等价量的差记账，
    并在首、中、末三个检查点用完整重算审计。

    Args:
        instance: 设计问题（通常为外部漂移趋势）
        design: 初始设计
        removals: 移除点数，缺省一直减到 k_min
        k_min: 最小设计大小，缺省 p+1，且不得小于 p+1
        config: 搜索参数（交换精修的最大轮数）
        refine: 每次移除后是否做交换精修

    Returns:
        ReductionReport
    """
    config = config or SearchSettings()
    t_start = time.time()
    p = instance.p
    k_min = p + 1 if k_min is None else k_min
    if k_min < p + 1:
        raise DesignError(f"k_min={k_min} 小于 p+1={p + 1}，拒绝缩减")
    if removals is None:
        removals = design.k - k_min
    if removals < 1:
        raise DesignError(f"removals={removals} 必须 >= 1")
    if design.k - removals < k_min:
        raise DesignError(f"移除 {removals} 个点后 k={design.k - removals} 小于 k_min={k_min}")

    cset = instance.cset
    counter = CriterionCounter()
    objective = DesignObjective(instance, CriterionKind.GV, counter)
    state = stage_state(cset, design, instance.model, instance.variant, track_logdet=True)
    baseline = state.logdet_d
    logger.info(f"Station reduce: k={design.k} -> {design.k - removals}, baseline logdet={baseline:.6g}")

    checkpoints = _audit_points(removals)
    steps: List[ReductionStep] = []
    audits: List[Dict[str, float]] = []
    first_exceeds = None
    for step in range(removals):
        removed, _ = best_removal(state, counter)
        state = advance(state, (), drop=[removed])
        logdet = state.logdet_d

        swapped = False
        if refine:
            before = objective.loss(state.design)
            subset, after, _ = steepest_swaps(
                lambda s: objective.loss(Design(s)),
                state.design.indices,
                before,
                range(cset.n),
                max_passes=config.max_outer_iters,
            )
            if subset != state.design.indices:
                swapped = True
                logdet += after - before
                system = build_system(cset, Design(subset), instance.model, instance.variant)
                state = StageState(system=system, logdet_d=logdet)

        k = state.design.k
        exceeds = logdet > baseline
        if exceeds and first_exceeds is None:
            first_exceeds = k
        steps.append(ReductionStep(
            k=k,
            removed=removed,
            swapped=swapped,
            logdet=logdet,
            m=cset.n - k,
            exceeds_baseline=exceeds,
            design=state.design.as_list(),
        ))
        logger.debug(f"Removed {removed} (k={k}), logdet={logdet:.6g}, swapped={swapped}")

        if step in checkpoints:
            audited = evaluate_design(cset, instance.model, instance.variant, state.design, CriterionKind.GV).value
            error = abs(audited - logdet)
            audits.append({"k": k, "tracked": logdet, "audited": audited, "abs_error": error})
            if error > AUDIT_TOL * max(1.0, abs(audited)):
                logger.warning(f"Reduction audit at k={k}: tracked {logdet:.10g} vs full {audited:.10g}")

    elapsed = time.time() - t_start
    logger.info(
        f"Station reduce done: final k={state.design.k}, first exceeds baseline at k={first_exceeds}, "
        f"{counter.calls} criterion calls, {elapsed:.2f}s"
    )
    return ReductionReport(
        baseline_k=design.k,
        baseline_logdet=baseline,
        steps=steps,
        final_design=state.design,
        first_exceeds_k=first_exceeds,
        criterion_calls=counter.calls,
        elapsed=elapsed,
        audits=audits,
    )
