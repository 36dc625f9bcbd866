"""(κ, φ) 参数研究：各准则最优设计、交叉效率、调用次数统计，以及单次增量设计的效率研究"""

import logging
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from tqdm import tqdm

from krigdes.config.settings import SearchSettings, StudyConfig
from krigdes.criteria.functionals import (
    CriterionKind,
    CriterionValue,
    cross_efficiency,
    evaluate_design,
    relative_efficiency,
    scale_to_unit_gv,
)
from krigdes.design.schemas import Design
from krigdes.design.space import plausible_start
from krigdes.incremental.update import stage_state
from krigdes.search.anneal import anneal_exchange
from krigdes.search.exhaustive import exhaustive_optimal
from krigdes.search.increment import incr_decr_optimize, select_increment
from krigdes.search.schemas import Instance, SearchResult
from krigdes.telemetry.logger import ProgressLogger
from krigdes.utils.errors import KrigdesError

logger = logging.getLogger(__name__)

FLAG_FACTOR = 3.0


def study_combos(study: StudyConfig) -> List[Tuple[float, float]]:
    """(κ, φ) 组合，κ 在外层；max_combos 截断"""
    combos = [(kappa, phi) for kappa in study.kappas for phi in study.phis]
    if study.max_combos is not None:
        combos = combos[: study.max_combos]
    return combos


def design_name(kind: CriterionKind) -> str:
    return f"xi_{kind.label}"


def combo_instance(base: Instance, kappa: float, phi: float) -> Instance:
    """只替换 κ、φ，σ²、τ² 与各向异性沿用 base"""
    return base.with_model(replace(base.model, phi=phi, kappa=kappa))


@dataclass
class ComboResult:
    """单个 (κ, φ) 组合的研究结果"""
    index: int
    kappa: float
    phi: float
    designs: Dict[str, List[int]] = field(default_factory=dict)
    values: Dict[str, Dict[str, float]] = field(default_factory=dict)
    efficiencies: List[Dict[str, Any]] = field(default_factory=list)
    calls: Dict[str, int] = field(default_factory=dict)
    unit_gv_scale: Optional[float] = None
    elapsed: float = 0.0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class StudyReport:
    """参数研究报告"""
    combos: List[ComboResult]
    criteria: List[str]
    design_size: int
    elapsed: float = 0.0

    @property
    def succeeded(self) -> List[ComboResult]:
        return [c for c in self.combos if c.ok]

    def efficiency_frame(self) -> pd.DataFrame:
        """每个组合、每个设计一行的交叉效率长表"""
        rows = []
        for combo in self.succeeded:
            for row in combo.efficiencies:
                rows.append({"combo": combo.index, "kappa": combo.kappa, "phi": combo.phi, **row})
        return pd.DataFrame(rows)

    def average_table(self) -> pd.DataFrame:
        """平均相对效率表：行为设计，列为 E_GV、E_G、E_V"""
        frame = self.efficiency_frame()
        if frame.empty:
            return frame
        columns = [c for c in frame.columns if c.startswith("E_")]
        return frame.groupby("design", sort=False)[columns].mean().reset_index()

    def call_medians(self) -> Dict[str, float]:
        """每个准则的准则调用次数中位数"""
        out = {}
        for name in self.criteria:
            calls = [c.calls[name] for c in self.succeeded if name in c.calls]
            if calls:
                out[name] = float(statistics.median(calls))
        return out

    def flagged_combos(self, factor: float = FLAG_FACTOR) -> List[Dict[str, Any]]:
        """调用次数超过中位数 factor 倍的组合"""
        medians = self.call_medians()
        flagged = []
        for combo in self.succeeded:
            for name, calls in combo.calls.items():
                median = medians.get(name)
                if median and calls > factor * median:
                    flagged.append({
                        "combo": combo.index,
                        "kappa": combo.kappa,
                        "phi": combo.phi,
                        "criterion": name,
                        "criterion_calls": calls,
                        "median": median,
                    })
        return flagged

    def to_dict(self) -> Dict[str, Any]:
        return {
            "design_size": self.design_size,
            "criteria": self.criteria,
            "combos": [vars(c) for c in self.combos],
            "average_efficiency": self.average_table().to_dict(orient="records"),
            "call_medians": self.call_medians(),
            "flagged_combos": self.flagged_combos(),
            "failed_combos": [c.index for c in self.combos if not c.ok],
            "elapsed": self.elapsed,
        }


def optimize(
    instance: Instance,
    kind: CriterionKind,
    k: int,
    config: SearchSettings,
    method: str = "anneal",
) -> SearchResult:
    """按方法名分派固定大小设计的优化"""
    if method == "exhaustive":
        return exhaustive_optimal(instance, kind, k, cap=config.exhaustive_cap)
    if method == "incr_decr":
        return incr_decr_optimize(instance, k, config, kind=kind)
    return anneal_exchange(instance, kind, k, config)


def _run_combo(
    index: int,
    kappa: float,
    phi: float,
    base: Instance,
    study: StudyConfig,
    search: SearchSettings,
    method: str,
) -> ComboResult:
    t_start = time.time()
    result = ComboResult(index=index, kappa=kappa, phi=phi)
    kinds = [CriterionKind.from_name(name) for name in study.criteria]
    try:
        instance = combo_instance(base, kappa, phi)
        optima: Dict[CriterionKind, SearchResult] = {}
        for kind in kinds:
            optima[kind] = optimize(instance, kind, study.design_size, search, method)
            result.designs[design_name(kind)] = optima[kind].design.as_list()
            result.calls[kind.value] = optima[kind].criterion_calls

        if study.scale_unit_gv and CriterionKind.GV in optima:
            gv = optima[CriterionKind.GV].criterion
            s2 = scale_to_unit_gv(gv.value, gv.m)
            result.unit_gv_scale = s2
            instance = instance.with_model(instance.model.scaled(math.sqrt(s2)))

        values: Dict[str, Dict[CriterionKind, CriterionValue]] = {}
        for kind, found in optima.items():
            name = design_name(kind)
            values[name] = {
                other: evaluate_design(instance.cset, instance.model, instance.variant, found.design, other)
                for other in kinds
            }
            result.values[name] = {other.value: v.value for other, v in values[name].items()}
        result.efficiencies = cross_efficiency(values)
    except KrigdesError as e:
        logger.warning(f"Study combo #{index} (kappa={kappa}, phi={phi}) failed: {e}")
        result.error = f"{type(e).__name__}: {e}"
    result.elapsed = time.time() - t_start
    return result


def _map_combos(fn, combos, workers: int, desc: str) -> list:
    """按组合顺序归并结果，与线程数无关"""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(tqdm(executor.map(fn, range(len(combos))), total=len(combos), desc=desc))
    return [fn(i) for i in tqdm(range(len(combos)), desc=desc)]


def run_study(
    base: Instance,
    study: StudyConfig,
    search: Optional[SearchSettings] = None,
    method: str = "anneal",
    progress: Optional[ProgressLogger] = None,
) -> StudyReport:
    """
    (κ, φ) 参数研究

    每个组合对 study.criteria 中的每个准则求最优设计，再在每个最优设计上重算全部准则，
    得到交叉效率矩阵。单个组合失败只记录，不中断研究。

    Args:
        base: 候选集合、σ²/τ²/各向异性与趋势（φ、κ 由组合覆盖）
        study: 研究参数
        search: 搜索参数（组合内部的重启串行执行）
        method: anneal / exhaustive / incr_decr
        progress: 可选的 JSONL 进度日志

    Returns:
        StudyReport
    """
    search = search or SearchSettings()
    inner = replace(search, workers=1)
    combos = study_combos(study)
    t_start = time.time()
    logger.info(
        f"Study: {len(combos)} combos, k={study.design_size}, criteria={study.criteria}, method={method}"
    )

    def _fn(i: int) -> ComboResult:
        kappa, phi = combos[i]
        outcome = _run_combo(i, kappa, phi, base, study, inner, method)
        if progress is not None:
            progress.log("combo_done", {
                "combo": i,
                "kappa": kappa,
                "phi": phi,
                "ok": outcome.ok,
                "calls": outcome.calls,
                "elapsed": outcome.elapsed,
            })
        return outcome

    results = _map_combos(_fn, combos, search.workers, "study")
    report = StudyReport(
        combos=results,
        criteria=[CriterionKind.from_name(c).value for c in study.criteria],
        design_size=study.design_size,
        elapsed=time.time() - t_start,
    )
    logger.info(f"Study done: {len(report.succeeded)}/{len(results)} combos succeeded in {report.elapsed:.1f}s")
    return report


@dataclass
class IncrementalCombo:
    """单个组合上的单次增量设计效率"""
    index: int
    kappa: float
    phi: float
    start: List[int] = field(default_factory=list)
    increment: List[int] = field(default_factory=list)
    optimum: List[int] = field(default_factory=list)
    incremental_logdet: Optional[float] = None
    optimum_logdet: Optional[float] = None
    efficiency: Optional[float] = None
    error: Optional[str] = None


@dataclass
class IncrementalStudyReport:
    """单次增量设计相对 GV 最优设计的效率汇总"""
    combos: List[IncrementalCombo]
    k_start: int
    l: int
    start_kind: str
    elapsed: float = 0.0

    @property
    def efficiencies(self) -> List[float]:
        return [c.efficiency for c in self.combos if c.efficiency is not None]

    @property
    def mean_efficiency(self) -> Optional[float]:
        return statistics.fmean(self.efficiencies) if self.efficiencies else None

    @property
    def median_efficiency(self) -> Optional[float]:
        return statistics.median(self.efficiencies) if self.efficiencies else None

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(c) for c in self.combos])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k_start": self.k_start,
            "l": self.l,
            "start": self.start_kind,
            "mean_efficiency": self.mean_efficiency,
            "median_efficiency": self.median_efficiency,
            "combos": [vars(c) for c in self.combos],
            "elapsed": self.elapsed,
        }


def _incremental_combo(
    index: int,
    kappa: float,
    phi: float,
    base: Instance,
    study: StudyConfig,
    search: SearchSettings,
) -> IncrementalCombo:
    out = IncrementalCombo(index=index, kappa=kappa, phi=phi)
    k_start, l = study.incremental_k_start, study.incremental_l
    try:
        instance = combo_instance(base, kappa, phi)
        cset = instance.cset
        if study.incremental_start == "optimal":
            start = anneal_exchange(instance, CriterionKind.GV, k_start, search).design
        else:
            start = plausible_start(cset, k_start)
        state = stage_state(cset, start, instance.model, instance.variant)
        choice = select_increment(state, l, "gv", search)
        enlarged = Design.of(list(start.indices) + list(choice.increment), cset.n)

        value = evaluate_design(cset, instance.model, instance.variant, enlarged, CriterionKind.GV)
        found = anneal_exchange(instance, CriterionKind.GV, k_start + l, search)
        optimum = min((found.criterion, value), key=lambda v: v.loss)
        out.start = start.as_list()
        out.increment = list(choice.increment)
        out.optimum = found.design.as_list() if optimum is found.criterion else enlarged.as_list()
        out.incremental_logdet = value.value
        out.optimum_logdet = optimum.value
        out.efficiency = relative_efficiency(optimum, value)
    except KrigdesError as e:
        logger.warning(f"Incremental combo #{index} (kappa={kappa}, phi={phi}) failed: {e}")
        out.error = f"{type(e).__name__}: {e}"
    return out


def run_incremental_study(
    base: Instance,
    study: StudyConfig,
    search: Optional[SearchSettings] = None,
) -> IncrementalStudyReport:
    """
    单次增量设计的效率研究

    从合理起始设计（或 GV 最优的 k_start 点设计）出发做一次大小为 l 的 GV 增量，
    与退火得到的 (k_start + l) 点 GV 最优设计比较；两者取更好的作为最优值。
    """
    search = search or SearchSettings()
    inner = replace(search, workers=1)
    combos = study_combos(study)
    t_start = time.time()

    def _fn(i: int) -> IncrementalCombo:
        kappa, phi = combos[i]
        return _incremental_combo(i, kappa, phi, base, study, inner)

    results = _map_combos(_fn, combos, search.workers, "incremental")
    report = IncrementalStudyReport(
        combos=results,
        k_start=study.incremental_k_start,
        l=study.incremental_l,
        start_kind=study.incremental_start,
        elapsed=time.time() - t_start,
    )
    logger.info(
        f"Incremental study: mean efficiency {report.mean_efficiency}, "
        f"median {report.median_efficiency} over {len(report.efficiencies)} combos"
    )
    return report
