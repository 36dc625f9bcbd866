"""oracle 等价性校验：更新公式、增量最优性、SK/MES、参数尺度不变性等。

每个检查返回一个 CheckResult；mandatory 的检查失败时整个校验失败，
非强制检查（如 SK/OK 最优设计一致性的猜想）只作为发现记录。
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from typing import Callable, Dict, List, Optional

import numpy as np

from eval.checks.contracts import CheckResult, ValidationSummary
from krigdes import __version__
from krigdes.config.settings import SearchSettings, StudyConfig
from krigdes.criteria.functionals import (
    CriterionKind,
    criterion_of,
    evaluate_design,
    gv_relative,
    relative_efficiency,
)
from krigdes.design.schemas import CandidateSet, Design, TrendBasis
from krigdes.design.space import complement, make_grid
from krigdes.incremental.update import (
    IncrementSweep,
    gv_increment_objective,
    stage_state,
    update_kriging_cov,
    update_weights,
)
from krigdes.kriging.covariance import CovModel, cov_matrix
from krigdes.kriging.system import KrigingVariant, build_system, kriging_cov, kriging_variances, weights
from krigdes.search.exhaustive import exhaustive_optimal
from krigdes.search.increment import incr_decr_optimize
from krigdes.search.schemas import Instance
from krigdes.search.study import (
    IncrementalStudyReport,
    StudyReport,
    design_name,
    run_incremental_study,
    run_study,
)
from krigdes.telemetry.logger import ProgressLogger
from krigdes.utils.errors import NumericalError, TrendError
from krigdes.utils.helpers import format_datetime, pick_best

logger = logging.getLogger(__name__)

KAPPAS = (0.25, 0.5, 1.0, 1.5, 2.0, 2.5)
PHIS = (0.1, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0)
MODERATE_KAPPAS = (0.25, 0.5, 1.0, 1.5)
MODERATE_PHIS = (0.1, 0.5, 0.75, 1.0, 1.5, 2.0)

UPDATE_TOL = 1e-8
IDENTITY_TOL = 1e-8
M_INDEPENDENCE_TOL = 1e-12
SCALE_TOL = 1e-10
EFFICIENCY_TOL = 1e-9

CONVERGENCE_SEEDS = 100
CONVERGENCE_THRESHOLD = 0.99
DESK_EFFICIENCY_FLOOR = 0.85
INCREMENTAL_MEAN_MIN = 0.97
INCREMENTAL_MEDIAN_TOL = 0.005


def random_variant(rng: np.random.Generator) -> KrigingVariant:
    """SK / OK / 线性 UK / 二次 UK 之一"""
    choice = int(rng.integers(4))
    if choice == 0:
        return KrigingVariant.simple()
    if choice == 1:
        return KrigingVariant.ordinary()
    if choice == 2:
        return KrigingVariant.universal(TrendBasis.from_name("linear"))
    return KrigingVariant.universal(TrendBasis.from_name("quadratic"))


def _rel_error(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def _result(name: str, mandatory: bool, passed: bool, **fields) -> CheckResult:
    status = "pass" if passed else ("fail" if mandatory else "finding")
    return CheckResult(name=name, mandatory=mandatory, status=status, passed=passed, **fields)


def check_update_equivalence(seed: int, instances: int = 200, tol: float = UPDATE_TOL) -> CheckResult:
    """
    第二阶段权重 [W₁ W₂] 与 Σ₀⁺ 的更新公式 vs 直接在 ξ₁ ∪ increment 上计算

    需要 jitter 的实例被跳过（jitter 改变了模型本身，两条路径不再可比）。
    """
    rng = np.random.default_rng(seed)
    cset = make_grid(10, 2)
    max_err = 0.0
    done = skipped = 0
    worst: Dict[str, float] = {}
    for _ in range(instances):
        variant = random_variant(rng)
        p = variant.p(2)
        model = CovModel(kappa=float(rng.choice(KAPPAS)), phi=float(rng.choice(PHIS)))
        k = int(rng.integers(max(p, 1), 13))
        l = int(rng.integers(1, 7))
        m = int(rng.integers(5, 41))
        perm = [int(i) for i in rng.permutation(cset.n)]
        xi1, inc, targets = perm[:k], perm[k:k + l], perm[k + l:k + l + m]
        try:
            state = stage_state(cset, Design.of(xi1, cset.n), model, variant)
            system2 = build_system(cset, Design.of(xi1 + inc, cset.n), model, variant)
            if state.system.chol.jitter > 0 or system2.chol.jitter > 0:
                skipped += 1
                continue
            upd_w = update_weights(state, inc, targets).stacked()
            upd_s = update_kriging_cov(state, inc, targets)
        except (TrendError, NumericalError):
            skipped += 1
            continue

        order = list(state.design.indices) + inc
        pos = {c: j for j, c in enumerate(system2.design.indices)}
        direct_w = weights(system2, targets)[:, [pos[c] for c in order]]
        direct_s = kriging_cov(system2, targets)
        err = max(_rel_error(upd_w, direct_w), _rel_error(upd_s, direct_s))
        done += 1
        if err > max_err:
            max_err = err
            worst = {"k": k, "l": l, "m": m, "p": p, "kappa": model.kappa, "phi": model.phi}
    return _result(
        "update_equivalence",
        mandatory=True,
        passed=done > 0 and max_err < tol,
        instances=done,
        max_error=max_err,
        tolerance=tol,
        seed=seed,
        detail={"skipped": skipped, "worst_instance": worst},
    )


def check_increment_argmax(seed: int, instances: int = 20, tol: float = IDENTITY_TOL) -> CheckResult:
    """
    增量最优性：argmax log|Σ₂| 与 argmin 第二阶段 GV 的并列集合一致，迹目标同理

    同时检查 log|Σ⁺| = log|Σ| − log|Σ₂| 与 tr Σ⁺ = tr Σ − (tr Σ₂ + tr Σ₂⁻¹Σ₂₀Σ₂₀ᵀ)。
    """
    rng = np.random.default_rng(seed)
    cset = make_grid(5, 2)
    max_err = 0.0
    done = 0
    mismatches: List[Dict] = []
    while done < instances:
        variant = random_variant(rng)
        p = variant.p(2)
        model = CovModel(kappa=float(rng.choice(MODERATE_KAPPAS)), phi=float(rng.choice(MODERATE_PHIS)))
        k = int(rng.integers(max(p, 1), max(p, 1) + 4))
        l = int(rng.integers(1, 4))
        xi1 = [int(i) for i in rng.choice(cset.n, size=k, replace=False)]
        try:
            state = stage_state(cset, Design.of(xi1, cset.n), model, variant, track_logdet=True)
        except (TrendError, NumericalError):
            continue
        if state.system.chol.jitter > 0:
            continue
        sweep = IncrementSweep(state)
        trace_d = float(kriging_variances(state.system, sweep.pool).sum())

        gv_upd, gv_dir, v_upd, v_dir = [], [], [], []
        for combo in itertools.combinations(sweep.pool, l):
            enlarged = Design.of(list(state.design.indices) + list(combo), cset.n)
            targets = complement(enlarged, cset.n)
            system2 = build_system(cset, enlarged, model, variant)
            direct_gv = criterion_of(system2, CriterionKind.GV, targets).value
            direct_tr = float(kriging_variances(system2, targets).sum())
            gain = sweep.gv(combo)
            v_gain = sweep.v(combo)
            max_err = max(
                max_err,
                abs(state.logdet_d - gain - direct_gv) / max(1.0, abs(direct_gv)),
                abs(trace_d - v_gain - direct_tr) / max(1.0, abs(direct_tr)),
            )
            gv_upd.append((-gain, combo))
            gv_dir.append((direct_gv, combo))
            v_upd.append((-v_gain, combo))
            v_dir.append((direct_tr, combo))

        done += 1
        for label, upd, direct in (("gv", gv_upd, gv_dir), ("v", v_upd, v_dir)):
            ties_upd = pick_best(upd)[2]
            ties_dir = pick_best(direct)[2]
            if ties_upd != ties_dir:
                mismatches.append({
                    "objective": label,
                    "design": state.design.as_list(),
                    "l": l,
                    "variant": variant.describe(),
                    "update_ties": [list(t) for t in ties_upd],
                    "direct_ties": [list(t) for t in ties_dir],
                })
    return _result(
        "increment_argmax",
        mandatory=True,
        passed=not mismatches and max_err < tol,
        instances=done,
        max_error=max_err,
        tolerance=tol,
        seed=seed,
        findings=mismatches,
    )


def check_sk_mes(seed: int, kappa: float = 1.5, phi: float = 1.0, tol: float = IDENTITY_TOL) -> CheckResult:
    """
    简单克里金下 GV 与 MES 的等价

    4×4 格点 k=3 的全部设计：log|C_ξ| + log|Σ_SK| = log|C_X|，
    argmax log|C_ξ| 与 argmin GV 的并列集合一致。
    """
    cset = make_grid(4, 2)
    model = CovModel(kappa=kappa, phi=phi)
    variant = KrigingVariant.simple()
    all_idx = list(range(cset.n))
    sign, logdet_x = np.linalg.slogdet(cov_matrix(model, cset, all_idx, all_idx))
    max_err = 0.0
    mes_items, gv_items = [], []
    for combo in itertools.combinations(all_idx, 3):
        design = Design(combo)
        system = build_system(cset, design, model, variant)
        gv = criterion_of(system, CriterionKind.GV, complement(design, cset.n)).value
        mes = system.logdet_c()
        max_err = max(max_err, abs(mes + gv - logdet_x) / max(1.0, abs(logdet_x)))
        mes_items.append((-mes, combo))
        gv_items.append((gv, combo))
    ties_mes = pick_best(mes_items)[2]
    ties_gv = pick_best(gv_items)[2]
    return _result(
        "sk_mes_equivalence",
        mandatory=True,
        passed=sign > 0 and ties_mes == ties_gv and max_err < tol,
        instances=len(gv_items),
        max_error=max_err,
        tolerance=tol,
        seed=seed,
        detail={"mes_ties": [list(t) for t in ties_mes], "gv_ties": [list(t) for t in ties_gv]},
    )


def check_sk_ok_argmin(seed: int, settings: int = 5) -> CheckResult:
    """SK 与 OK 的 GV 最优设计是否相同（5×5 格点，k=4）；不一致只记为发现"""
    rng = np.random.default_rng(seed)
    cset = make_grid(5, 2)
    findings = []
    pairs = [(float(rng.choice(KAPPAS)), float(rng.choice(PHIS))) for _ in range(settings)]
    for kappa, phi in pairs:
        model = CovModel(kappa=kappa, phi=phi)
        ties = {}
        for variant in (KrigingVariant.simple(), KrigingVariant.ordinary()):
            items = []
            for combo in itertools.combinations(range(cset.n), 4):
                try:
                    system = build_system(cset, Design(combo), model, variant)
                except (TrendError, NumericalError):
                    continue
                items.append((gv_relative(system), combo))
            ties[variant.kind.value] = pick_best(items)[2]
        if ties["simple"] != ties["ordinary"]:
            findings.append({
                "model": model.to_dict(),
                "grid": "5x5",
                "k": 4,
                "simple_ties": [list(t) for t in ties["simple"]],
                "ordinary_ties": [list(t) for t in ties["ordinary"]],
            })
    if findings:
        logger.info(f"SK/OK argmin differs on {len(findings)} of {len(pairs)} settings")
    return _result(
        "sk_ok_argmin",
        mandatory=False,
        passed=not findings,
        instances=len(pairs),
        seed=seed,
        findings=findings,
    )


def _timed(fn: Callable[[], float], repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def check_m_independence(
    seed: int,
    m_small: int = 400,
    m_large: int = 10_000,
    repeats: int = 20,
    max_ratio: float = 2.0,
) -> CheckResult:
    """同一 ξ₁ 与增量，在 m_small 与 m_large 个附加预测点下 GV 增量目标相同且耗时相当"""
    rng = np.random.default_rng(seed)
    k, l = 12, 4
    core = rng.uniform(0.0, 10.0, size=(k + l, 2))
    model = CovModel(kappa=1.5, phi=2.0)
    variant = KrigingVariant.ordinary()
    design = Design(tuple(range(k)))
    inc = list(range(k, k + l))

    values, timings = [], []
    for m in (m_small, m_large):
        coords = np.vstack([core, rng.uniform(0.0, 10.0, size=(m, 2))])
        cset = CandidateSet(ids=np.arange(len(coords)), coords=coords, source=f"dummy(m={m})")
        state = stage_state(cset, design, model, variant)
        values.append(gv_increment_objective(state, inc))
        timings.append(_timed(lambda: gv_increment_objective(state, inc), repeats))

    err = abs(values[0] - values[1]) / max(1.0, abs(values[0]))
    ratio = timings[1] / timings[0] if timings[0] > 0 else 1.0
    return _result(
        "m_independence",
        mandatory=True,
        passed=err <= M_INDEPENDENCE_TOL and ratio <= max_ratio,
        instances=2,
        max_error=err,
        tolerance=M_INDEPENDENCE_TOL,
        seed=seed,
        detail={"m": [m_small, m_large], "seconds": timings, "time_ratio": ratio},
    )


def check_scale_invariance(
    seed: int,
    scales: tuple = (1e-3, 1.0, 1e3),
    designs: int = 5,
    tol: float = SCALE_TOL,
) -> CheckResult:
    """
    响应乘以 s 后：各准则的最优设计集合不变，相对效率不变且都不超过 1
    """
    rng = np.random.default_rng(seed)
    cset = make_grid(4, 2)
    variant = KrigingVariant.ordinary()
    base = Instance(cset, CovModel(kappa=1.0, phi=1.0), variant)
    kinds = (CriterionKind.GV, CriterionKind.G, CriterionKind.V)
    samples = [Design.of(rng.choice(cset.n, size=3, replace=False).tolist(), cset.n) for _ in range(designs)]

    ties: Dict[float, Dict[str, list]] = {}
    effs: Dict[float, np.ndarray] = {}
    above_one = 0
    for s in scales:
        instance = base.with_model(base.model.scaled(s))
        ties[s] = {}
        row = []
        for kind in kinds:
            optimum = exhaustive_optimal(instance, kind, 3)
            ties[s][kind.value] = optimum.ties
            for design in samples:
                value = evaluate_design(cset, instance.model, variant, design, kind)
                e = relative_efficiency(optimum.criterion, value)
                above_one += e > 1 + 1e-9
                row.append(e)
        effs[s] = np.array(row)

    ref = 1.0 if 1.0 in effs else scales[0]
    max_err = max(float(np.max(np.abs(effs[s] - effs[ref]))) for s in scales)
    same_ties = all(ties[s] == ties[ref] for s in scales)
    return _result(
        "scale_invariance",
        mandatory=True,
        passed=same_ties and max_err < tol and above_one == 0,
        instances=len(scales) * len(kinds),
        max_error=max_err,
        tolerance=tol,
        seed=seed,
        detail={"scales": list(scales), "efficiencies_above_one": int(above_one), "same_ties": same_ties},
    )


def check_incr_decr_convergence(
    seed: int,
    seeds: int = CONVERGENCE_SEEDS,
    threshold: float = CONVERGENCE_THRESHOLD,
) -> CheckResult:
    """增量-减量迭代从随机起点出发达到穷举 GV 最优的比例（4×4 与 5×5 格点，OK，k=4，逐实例判定）"""
    cases = [
        ("grid4_k4", make_grid(4, 2), 4),
        ("grid5_k4", make_grid(5, 2), 4),
    ]
    per_instance = []
    for name, cset, k in cases:
        instance = Instance(cset, CovModel(kappa=1.0, phi=1.0), KrigingVariant.ordinary())
        optimum = exhaustive_optimal(instance, CriterionKind.GV, k)
        optimal_set = set(optimum.ties)
        hits = 0
        for r in range(seeds):
            result = incr_decr_optimize(instance, k, SearchSettings(seed=seed + r, restarts=1))
            hits += result.design.indices in optimal_set
        per_instance.append({
            "instance": name,
            "hits": hits,
            "hit_rate": hits / seeds,
            "optimum": list(optimum.design.indices),
        })
        logger.info(f"incr_decr convergence {name}: {hits}/{seeds}")
    return _result(
        "incr_decr_convergence",
        mandatory=True,
        passed=all(entry["hit_rate"] >= threshold for entry in per_instance),
        instances=seeds * len(cases),
        seed=seed,
        detail={"threshold": threshold, "seeds": seeds, "per_instance": per_instance},
    )


def judge_study_efficiencies(
    report: StudyReport,
    floor: float = DESK_EFFICIENCY_FLOOR,
    tol: float = EFFICIENCY_TOL,
) -> CheckResult:
    """参数研究的效率门槛：ξ_GV 在每个准则下的效率 >= floor，且全部交叉效率 <= 1"""
    gv_name = design_name(CriterionKind.GV)
    gv_effs: List[float] = []
    all_effs: List[float] = []
    for combo in report.succeeded:
        for row in combo.efficiencies:
            values = [v for key, v in row.items() if key.startswith("E_")]
            all_effs.extend(values)
            if row["design"] == gv_name:
                gv_effs.extend(values)
    failed = [c.index for c in report.combos if not c.ok]
    min_gv = min(gv_effs) if gv_effs else None
    max_eff = max(all_effs) if all_effs else None
    passed = (
        not failed
        and min_gv is not None
        and min_gv >= floor
        and max_eff <= 1.0 + tol
    )
    return _result(
        "study_efficiency_thresholds",
        mandatory=True,
        passed=passed,
        instances=len(report.combos),
        max_error=max(0.0, (max_eff or 1.0) - 1.0),
        tolerance=tol,
        detail={
            "floor": floor,
            "min_gv_design_efficiency": min_gv,
            "max_efficiency": max_eff,
            "failed_combos": failed,
            "average_efficiency": report.average_table().to_dict(orient="records") if report.succeeded else [],
        },
    )


def judge_incremental_efficiency(
    report: IncrementalStudyReport,
    mean_min: float = INCREMENTAL_MEAN_MIN,
    median_tol: float = INCREMENTAL_MEDIAN_TOL,
) -> CheckResult:
    """单次增量设计的效率门槛：均值 >= mean_min，中位数在 1 ± median_tol 内"""
    mean, median = report.mean_efficiency, report.median_efficiency
    failed = [c.index for c in report.combos if c.efficiency is None]
    passed = (
        not failed
        and mean is not None
        and mean >= mean_min
        and abs(median - 1.0) <= median_tol
    )
    return _result(
        "incremental_efficiency_thresholds",
        mandatory=True,
        passed=passed,
        instances=len(report.combos),
        max_error=abs(median - 1.0) if median is not None else math.inf,
        tolerance=median_tol,
        detail={
            "mean_min": mean_min,
            "mean_efficiency": mean,
            "median_efficiency": median,
            "efficiencies": report.efficiencies,
            "failed_combos": failed,
        },
    )


def check_desk_study(seed: int, workers: int = 1) -> CheckResult:
    """桌面规模参数研究：17×17 格点，线性趋势，9 点设计，6 个 (κ, φ) 组合"""
    instance = Instance(
        make_grid(17, 2, 1.0),
        CovModel(),
        KrigingVariant.universal(TrendBasis.from_name("linear")),
    )
    study = StudyConfig(kappas=[0.5, 1.5, 2.5], phis=[0.5, 2.0], design_size=9, incremental_l=0)
    search = SearchSettings(seed=seed, restarts=2, workers=workers)
    result = judge_study_efficiencies(run_study(instance, study, search))
    result["seed"] = seed
    return result


def check_incremental_study(seed: int, workers: int = 1) -> CheckResult:
    """缩小规模的单次增量效率研究：9×9 格点，二次趋势，合理起始 6 点 + 6 点增量，3×3 个组合"""
    instance = Instance(
        make_grid(9, 2, 2.0),
        CovModel(),
        KrigingVariant.universal(TrendBasis.from_name("quadratic")),
    )
    study = StudyConfig(
        kappas=[0.5, 1.5, 2.5],
        phis=[0.5, 1.0, 3.0],
        design_size=12,
        incremental_start="plausible",
        incremental_k_start=6,
        incremental_l=6,
    )
    search = SearchSettings(seed=seed, restarts=4, workers=workers)
    result = judge_incremental_efficiency(run_incremental_study(instance, study, search))
    result["seed"] = seed
    return result


def run_validation(
    seed: int = 0,
    full: bool = False,
    progress: Optional[ProgressLogger] = None,
) -> ValidationSummary:
    """
    运行全部 oracle 校验

    Args:
        seed: 随机实例的种子（打印在报告中，可复现失败）
        full: 是否追加桌面规模参数研究与单次增量效率研究两项门槛检查（耗时较长）
        progress: 可选的 JSONL 进度日志

    Returns:
        ValidationSummary
    """
    checks: List[Callable[[], CheckResult]] = [
        lambda: check_update_equivalence(seed),
        lambda: check_increment_argmax(seed),
        lambda: check_sk_mes(seed),
        lambda: check_sk_ok_argmin(seed),
        lambda: check_m_independence(seed),
        lambda: check_scale_invariance(seed),
        lambda: check_incr_decr_convergence(seed),
    ]
    if full:
        checks += [
            lambda: check_desk_study(seed),
            lambda: check_incremental_study(seed),
        ]
    results: List[CheckResult] = []
    for run in checks:
        start = time.time()
        result = run()
        result["elapsed"] = time.time() - start
        results.append(result)
        logger.info(
            f"Check {result['name']}: {result['status']} "
            f"(max_error={result.get('max_error', 0.0):.3g}, {result['elapsed']:.1f}s)"
        )
        if progress is not None:
            progress.log("check_done", dict(result))

    passed = all(r["passed"] for r in results if r["mandatory"])
    return ValidationSummary(
        run_id=format_datetime(fmt="%Y%m%d_%H%M%S"),
        tool_version=__version__,
        seed=seed,
        passed=passed,
        checks=results,
        counters={
            "total": len(results),
            "failed": sum(1 for r in results if r["status"] == "fail"),
            "findings": sum(1 for r in results if r["status"] == "finding"),
        },
    )
