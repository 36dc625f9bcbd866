"""CLI 任务实现：每个任务读取 Settings，运行对应的库函数，写出结果文件"""

import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from eval.checks.aggregate import aggregate_study, write_study_outputs, write_validation_outputs
from eval.checks.oracles import run_validation
from eval.checks.report import render_study_report, render_validation_report
from krigdes import __version__
from krigdes.config.settings import Settings
from krigdes.criteria.functionals import CriterionKind, cross_efficiency, evaluate_design
from krigdes.design.schemas import BasisKind, CandidateSet, Design, TrendBasis
from krigdes.design.space import complement, ids_to_indices, load_candidates, make_grid
from krigdes.incremental.update import stage_state
from krigdes.kriging.covariance import CovModel
from krigdes.kriging.system import KrigingVariant, build_system, kriging_variances
from krigdes.search.anneal import anneal_exchange, exchange_refine
from krigdes.search.exhaustive import exhaustive_optimal
from krigdes.search.increment import incr_decr_optimize, select_increment
from krigdes.search.reduce import station_reduce
from krigdes.search.schemas import Instance, SearchResult
from krigdes.search.study import run_incremental_study, run_study
from krigdes.telemetry.logger import ProgressLogger, SearchTelemetry
from krigdes.utils.errors import ConfigError, DesignError, TrendError, ValidationFailure
from krigdes.utils.helpers import format_datetime, write_json

logger = logging.getLogger(__name__)

# 研究缺省在 {1,…,17}² 格点上进行
DEFAULT_STUDY_GRID = (17, 1.0)


def build_candidates(settings: Settings) -> CandidateSet:
    cand = settings.candidates
    if cand.grid_n is not None:
        return make_grid(cand.grid_n, cand.grid_d, cand.grid_spacing, max_points=cand.max_points)
    if cand.csv_path:
        return load_candidates(
            settings.resolve_path(cand.csv_path),
            coord_columns=cand.coord_columns,
            id_column=cand.id_column,
            max_points=cand.max_points,
        )
    if settings.task.name == "study":
        n, spacing = DEFAULT_STUDY_GRID
        return make_grid(n, 2, spacing, max_points=cand.max_points)
    raise ConfigError("[candidates] 必须且只能指定 grid_n 或 csv_path 之一")


def build_variant(settings: Settings, cset: CandidateSet) -> KrigingVariant:
    trend = settings.trend
    basis = None
    if trend.variant.lower() == "universal":
        basis = TrendBasis.from_name(trend.basis, trend.monomials, trend.covariate)
        if basis.kind is BasisKind.EXTERNAL_DRIFT and basis.covariate not in cset.covariate_names:
            raise TrendError(
                f"外部漂移协变量 '{basis.covariate}' 不在候选集合中（可用: {cset.covariate_names}）"
            )
    return KrigingVariant.from_name(trend.variant, basis, trend.known_mean)


def build_instance(settings: Settings) -> Instance:
    """由配置构造设计问题"""
    cset = build_candidates(settings)
    m = settings.model
    model = CovModel(
        sigma2=m.sigma2,
        phi=m.phi,
        kappa=m.kappa,
        nugget=m.nugget,
        aniso_angle=m.aniso_angle,
        aniso_ratio=m.aniso_ratio,
    )
    return Instance(cset=cset, model=model, variant=build_variant(settings, cset))


def task_design(settings: Settings, cset: CandidateSet, ids: Optional[List[int]] = None) -> Design:
    ids = settings.task.design if ids is None else ids
    if not ids:
        raise ConfigError(f"[task] {settings.task.name} 需要设计 design（候选点 id 列表）")
    return Design.of(ids_to_indices(cset, ids), cset.n)


def out_dir(settings: Settings) -> Path:
    path = Path(settings.output.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def envelope(
    settings: Settings,
    elapsed: float,
    criterion_calls: int,
    payload: Dict[str, Any],
) -> Dict[str, Any]:
    """结果文件公共字段"""
    return {
        "tool_version": __version__,
        "task": settings.task.name,
        "timestamp": format_datetime(),
        "elapsed": elapsed,
        "seed": settings.search.seed,
        "criterion_calls": criterion_calls,
        "config": settings.to_dict(),
        **payload,
    }


def _telemetry(settings: Settings, root: Path) -> SearchTelemetry:
    progress = ProgressLogger(root / "progress.jsonl") if settings.output.progress_log else None
    return SearchTelemetry(log_dir=str(root / "telemetry"), progress=progress)


def variance_map_frame(instance: Instance, design: Design) -> pd.DataFrame:
    """每个非设计候选点一行：坐标 x1..xd 与克里金方差"""
    cset = instance.cset
    targets = complement(design, cset.n)
    system = build_system(cset, design, instance.model, instance.variant)
    variances = kriging_variances(system, targets)
    frame = pd.DataFrame(cset.coords[targets], columns=[f"x{j + 1}" for j in range(cset.dim)])
    frame["variance"] = variances
    return frame


def write_variance_map(path: Path, instance: Instance, design: Design) -> Path:
    variance_map_frame(instance, design).to_csv(path, index=False, float_format="%.12g")
    return path


def _search_payload(result: SearchResult, instance: Instance) -> Dict[str, Any]:
    return {"instance": instance.describe(), "result": result.to_dict(instance.cset)}


def cmd_optimize(settings: Settings) -> Path:
    """固定大小设计优化"""
    start = time.time()
    instance = build_instance(settings)
    task, search = settings.task, settings.search
    kind = CriterionKind.from_name(task.criterion)
    root = out_dir(settings)
    telemetry = _telemetry(settings, root)

    if task.method == "exhaustive":
        result = exhaustive_optimal(instance, kind, task.k, cap=search.exhaustive_cap)
    elif task.method == "incr_decr":
        result = incr_decr_optimize(instance, task.k, search, kind=kind, telemetry=telemetry)
    else:
        result = anneal_exchange(instance, kind, task.k, search, telemetry=telemetry)
    telemetry.save()

    payload = _search_payload(result, instance)
    if settings.output.variance_map:
        payload["variance_map"] = str(write_variance_map(root / "variance_map.csv", instance, result.design))
    path = write_json(root / settings.output.result_name, envelope(
        settings, time.time() - start, result.criterion_calls, payload
    ))
    logger.info(f"Wrote {path}")
    return path


def cmd_variance_map(settings: Settings) -> Path:
    """设计的克里金方差图（CSV）"""
    instance = build_instance(settings)
    design = task_design(settings, instance.cset)
    path = write_variance_map(out_dir(settings) / "variance_map.csv", instance, design)
    logger.info(f"Wrote {path}")
    return path


def cmd_increment(settings: Settings) -> Path:
    """在给定设计上选择大小为 l 的最优增量"""
    start = time.time()
    instance = build_instance(settings)
    cset = instance.cset
    objective = settings.task.criterion.lower()
    if objective not in ("gv", "v", "g"):
        raise ConfigError(f"[task] increment 的准则必须是 gv / v / g，当前为 {settings.task.criterion}")
    initial = task_design(settings, cset)
    state = stage_state(cset, initial, instance.model, instance.variant)
    choice = select_increment(state, settings.task.l, objective, settings.search)
    enlarged = Design.of(list(initial.indices) + list(choice.increment), cset.n)
    audited = evaluate_design(cset, instance.model, instance.variant, enlarged, CriterionKind.GV)

    payload = {
        "instance": instance.describe(),
        "result": {
            "initial_design": initial.as_list(),
            "increment": list(choice.increment),
            "increment_ids": [int(cset.ids[i]) for i in choice.increment],
            "design": enlarged.as_list(),
            "design_ids": [int(cset.ids[i]) for i in enlarged],
            "objective": objective,
            "objective_value": choice.value,
            "exhaustive": choice.exhaustive,
            "criterion": audited.to_dict(),
        },
    }
    path = write_json(out_dir(settings) / settings.output.result_name, envelope(
        settings, time.time() - start, choice.criterion_calls, payload
    ))
    logger.info(f"Wrote {path}")
    return path


def cmd_efficiency(settings: Settings) -> Path:
    """多个同样大小设计的交叉效率表（CSV + JSON）"""
    start = time.time()
    instance = build_instance(settings)
    cset = instance.cset
    designs = {name: task_design(settings, cset, ids) for name, ids in (settings.task.designs or {}).items()}
    sizes = {name: d.k for name, d in designs.items()}
    if len(set(sizes.values())) != 1:
        raise DesignError(f"交叉效率要求设计大小相同: {sizes}")

    kinds = (CriterionKind.GV, CriterionKind.G, CriterionKind.V)
    values = {
        name: {kind: evaluate_design(cset, instance.model, instance.variant, d, kind) for kind in kinds}
        for name, d in designs.items()
    }
    rows = cross_efficiency(values)
    root = out_dir(settings)
    table_path = root / "efficiency.csv"
    pd.DataFrame(rows).to_csv(table_path, index=False)

    payload = {
        "instance": instance.describe(),
        "designs": {name: d.as_list() for name, d in designs.items()},
        "values": {name: {k.value: v.to_dict() for k, v in vals.items()} for name, vals in values.items()},
        "efficiency": rows,
        "table": str(table_path),
    }
    calls = len(designs) * len(kinds)
    path = write_json(root / settings.output.result_name, envelope(settings, time.time() - start, calls, payload))
    logger.info(f"Wrote {path} and {table_path}")
    return path


def cmd_reduce(settings: Settings) -> Path:
    """监测网络逐点缩减；removals=0 时只做交换精修并按 optimize 的格式输出"""
    start = time.time()
    instance = build_instance(settings)
    design = task_design(settings, instance.cset)
    root = out_dir(settings)

    if settings.task.removals == 0:
        result = exchange_refine(instance, CriterionKind.GV, design, settings.search)
        payload = _search_payload(result, instance)
        calls = result.criterion_calls
    else:
        report = station_reduce(
            instance,
            design,
            removals=settings.task.removals,
            k_min=settings.task.k_min,
            config=settings.search,
        )
        payload = {"instance": instance.describe(), "reduction": report.to_dict(instance.cset)}
        trajectory = pd.DataFrame(payload["reduction"]["trajectory"]).drop(columns=["design"])
        trajectory.to_csv(root / "reduction_trajectory.csv", index=False)
        calls = report.criterion_calls
    path = write_json(root / settings.output.result_name, envelope(settings, time.time() - start, calls, payload))
    logger.info(f"Wrote {path}")
    return path


def cmd_validate(settings: Settings, full: bool = False) -> Path:
    """oracle 校验；强制检查失败时抛出 ValidationFailure"""
    root = out_dir(settings)
    progress = ProgressLogger(root / "progress.jsonl") if settings.output.progress_log else None
    summary = run_validation(seed=settings.search.seed, full=full, progress=progress)
    paths = write_validation_outputs(str(root), summary)
    report_path = root / "validation_report.md"
    report_path.write_text(render_validation_report(summary), encoding="utf-8")

    print(f"validate seed={summary['seed']}: {'PASS' if summary['passed'] else 'FAIL'}")
    for check in summary["checks"]:
        print(f"  {check['name']:<24} {check['status']:<8} max_error={check.get('max_error', 0.0):.3g}")
    if not summary["passed"]:
        failed = [c["name"] for c in summary["checks"] if c["status"] == "fail"]
        raise ValidationFailure(f"校验失败: {failed}（seed={summary['seed']}）")
    return paths["summary"]


def cmd_study(settings: Settings) -> Path:
    """(κ, φ) 参数研究，输出目录包含 JSON 汇总、CSV 表格与 markdown 报告"""
    instance = build_instance(settings)
    root = out_dir(settings)
    progress = ProgressLogger(root / "progress.jsonl") if settings.output.progress_log else None
    study, search = settings.study, settings.search

    report = run_study(instance, study, search, method=settings.task.method, progress=progress)
    incremental = None
    if study.incremental_l > 0:
        incremental = run_incremental_study(instance, study, search)

    summary = aggregate_study(report, search.seed, incremental)
    paths = write_study_outputs(str(root), report, summary, settings.to_dict(), incremental)
    (root / "study_report.md").write_text(render_study_report(summary), encoding="utf-8")
    logger.info(f"Wrote study outputs to {root}")
    return paths["summary"]


COMMANDS = {
    "optimize": cmd_optimize,
    "increment": cmd_increment,
    "reduce": cmd_reduce,
    "efficiency": cmd_efficiency,
    "study": cmd_study,
    "variance-map": cmd_variance_map,
    "validate": cmd_validate,
}
