"""邻点交换 + 模拟退火，以及确定性的交换精修

核心循环作用于“全集中的 k 元子集”（排序后的下标元组），固定大小设计和增量选择共用。
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from krigdes.config.settings import AnnealConfig, SearchSettings
from krigdes.criteria.functionals import CriterionKind, evaluate_design
from krigdes.design.schemas import Design
from krigdes.design.space import neighbor_table
from krigdes.search.objective import CriterionCounter, DesignObjective, valid_random_design
from krigdes.search.schemas import Instance, SearchResult
from krigdes.telemetry.logger import RestartLog, SearchTelemetry
from krigdes.utils.helpers import is_tie, pick_best

logger = logging.getLogger(__name__)

Subset = Tuple[int, ...]
LossFn = Callable[[Subset], float]


@dataclass
class AnnealRun:
    """一次退火的结果"""
    best: Subset
    loss: float
    iterations: int
    accepted: int = 0
    trace: List[float] = field(default_factory=list)


def swap_in(subset: Subset, out_point: int, in_point: int) -> Subset:
    return tuple(sorted([i for i in subset if i != out_point] + [int(in_point)]))


def better(loss: float, subset: Subset, best_loss: float, best: Subset) -> bool:
    """严格更优，或并列且字典序更小"""
    if is_tie(loss, best_loss):
        return subset < best
    return loss < best_loss


def steepest_swaps(
    loss_fn: LossFn,
    subset: Subset,
    loss: float,
    universe: Sequence[int],
    max_passes: Optional[int] = None,
) -> Tuple[Subset, float, int]:
    """
    最速下降交换：每轮试遍所有 (out, in) 交换，取最好的一个，直到没有改进

    Returns:
        (subset, loss, passes)
    """
    passes = 0
    while max_passes is None or passes < max_passes:
        passes += 1
        best_loss, best = loss, subset
        inside = set(subset)
        outside = [b for b in universe if b not in inside]
        for a in subset:
            for b in outside:
                cand = swap_in(subset, a, b)
                cand_loss = loss_fn(cand)
                if math.isfinite(cand_loss) and better(cand_loss, cand, best_loss, best):
                    best_loss, best = cand_loss, cand
        if best == subset:
            break
        subset, loss = best, best_loss
    return subset, loss, passes


def estimate_t0(
    loss_fn: LossFn,
    subset: Subset,
    loss: float,
    universe: Sequence[int],
    rng: np.random.Generator,
    samples: int,
) -> float:
    """初始温度：从起点随机交换 samples 次，取准则差的标准差"""
    inside = set(subset)
    outside = [b for b in universe if b not in inside]
    deltas = []
    for _ in range(samples):
        a = subset[int(rng.integers(len(subset)))]
        b = outside[int(rng.integers(len(outside)))]
        cand_loss = loss_fn(swap_in(subset, a, b))
        if math.isfinite(cand_loss) and math.isfinite(loss):
            deltas.append(cand_loss - loss)
    if not deltas:
        return 1.0
    spread = float(np.std(deltas))
    if spread <= 0:
        spread = float(np.mean(np.abs(deltas)))
    return spread if spread > 0 else 1.0


def anneal_subset(
    loss_fn: LossFn,
    start: Subset,
    start_loss: float,
    universe: Sequence[int],
    table: List[np.ndarray],
    rng: np.random.Generator,
    cfg: AnnealConfig,
    max_outer_iters: int,
) -> AnnealRun:
    """
    模拟退火：随机取子集中的一个点，与它邻域内一个不在子集中的点交换

    Δ ≤ 0 总是接受，否则以 exp(−Δ/T) 接受；T ≤ 0 时退化为爬山。
    每个温度平台 cfg.moves_per_temperature 步，几何降温；
    连续 cfg.patience 个平台没有改进或达到 max_outer_iters 时停止。
    """
    members = set(int(u) for u in universe)
    current, cur_loss = start, start_loss
    best, best_loss = current, cur_loss
    temperature = cfg.t0 if cfg.t0 is not None else estimate_t0(
        loss_fn, current, cur_loss, universe, rng, cfg.spread_samples
    )

    trace: List[float] = []
    stale = 0
    accepted = 0
    iterations = 0
    for outer in range(max_outer_iters):
        iterations = outer + 1
        improved = False
        for _ in range(cfg.moves_per_temperature):
            inside = set(current)
            a = current[int(rng.integers(len(current)))]
            free = [int(b) for b in table[a] if int(b) in members and int(b) not in inside]
            if not free:
                free = [b for b in universe if b not in inside]
            b = free[int(rng.integers(len(free)))]
            cand = swap_in(current, a, b)
            cand_loss = loss_fn(cand)
            if not math.isfinite(cand_loss):
                continue
            delta = cand_loss - cur_loss
            if delta <= 0:
                accept = True
            elif temperature > 0:
                accept = rng.random() < math.exp(-delta / temperature)
            else:
                accept = False
            if not accept:
                continue
            accepted += 1
            current, cur_loss = cand, cand_loss
            if better(cur_loss, current, best_loss, best):
                if not is_tie(cur_loss, best_loss):
                    improved = True
                best, best_loss = current, cur_loss
        trace.append(best_loss)
        stale = 0 if improved else stale + 1
        if stale >= cfg.patience:
            break
        temperature *= cfg.cooling

    if cfg.polish:
        best, best_loss, _ = steepest_swaps(loss_fn, best, best_loss, universe)
    return AnnealRun(best=best, loss=best_loss, iterations=iterations, accepted=accepted, trace=trace)


def _design_loss(objective: DesignObjective) -> LossFn:
    return lambda subset: objective.loss(Design(subset))


def exchange_refine(
    instance: Instance,
    kind: CriterionKind,
    design: Design,
    config: Optional[SearchSettings] = None,
    pool: Optional[Sequence[int]] = None,
) -> SearchResult:
    """
    确定性交换精修（Fedorov 交换）

    Args:
        instance: 设计问题
        kind: 准则
        design: 起始设计
        config: 搜索参数（max_outer_iters 作为最大轮数）
        pool: 可换入的候选点，缺省为全部候选点

    Returns:
        SearchResult
    """
    config = config or SearchSettings()
    start = time.time()
    objective = DesignObjective(instance, kind)
    loss = objective.loss(design)
    if not math.isfinite(loss):
        raise ValueError(f"起始设计 {design.as_list()} 不可识别")
    universe = range(instance.cset.n) if pool is None else sorted(set(pool) | set(design.indices))
    subset, loss, passes = steepest_swaps(
        _design_loss(objective), design.indices, loss, list(universe), max_passes=config.max_outer_iters
    )
    refined = Design(subset)
    criterion = evaluate_design(instance.cset, instance.model, instance.variant, refined, kind)
    return SearchResult(
        design=refined,
        criterion=criterion,
        criterion_calls=objective.calls,
        iterations=passes,
        elapsed=time.time() - start,
        seed=config.seed,
        method="exchange",
    )


def _anneal_restart(
    instance: Instance,
    kind: CriterionKind,
    k: int,
    config: SearchSettings,
    seed_seq: np.random.SeedSequence,
    table: List[np.ndarray],
    start_design: Optional[Design] = None,
) -> Tuple[AnnealRun, int, float]:
    t_start = time.time()
    rng = np.random.default_rng(seed_seq)
    objective = DesignObjective(instance, kind, CriterionCounter())
    if start_design is None:
        start, start_loss = valid_random_design(objective, rng, k)
    else:
        start, start_loss = start_design, objective.loss(start_design)
    run = anneal_subset(
        _design_loss(objective),
        start.indices,
        start_loss,
        range(instance.cset.n),
        table,
        rng,
        config.anneal,
        config.max_outer_iters,
    )
    return run, objective.calls, time.time() - t_start


def anneal_exchange(
    instance: Instance,
    kind: CriterionKind,
    k: int,
    config: Optional[SearchSettings] = None,
    telemetry: Optional[SearchTelemetry] = None,
    start_design: Optional[Design] = None,
) -> SearchResult:
    """
    邻点交换 + 模拟退火

    每次重启使用由 config.seed 派生的独立随机流；重启可以并发执行，
    结果按 (loss, 字典序设计) 归并，与线程数无关。

    Args:
        instance: 设计问题
        kind: 准则
        k: 设计大小
        config: 搜索参数
        telemetry: 可选的搜索日志
        start_design: 固定的起始设计（缺省随机抽取）

    Returns:
        SearchResult（criterion 为最终设计的独立重算值）
    """
    config = config or SearchSettings()
    t_start = time.time()
    cset = instance.cset
    table = neighbor_table(cset, radius=config.neighborhood_radius, nearest=config.nearest_r)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    def _run(i: int):
        return _anneal_restart(instance, kind, k, config, seeds[i], table, start_design)

    if config.workers > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            outcomes = list(executor.map(_run, range(config.restarts)))
    else:
        outcomes = [_run(i) for i in range(config.restarts)]

    restarts: List[Dict] = []
    for i, (run, calls, elapsed) in enumerate(outcomes):
        restarts.append({
            "restart": i,
            "loss": run.loss,
            "design": list(run.best),
            "criterion_calls": calls,
            "iterations": run.iterations,
            "accepted": run.accepted,
        })
        if telemetry is not None:
            telemetry.log_restart(RestartLog(
                restart=i,
                seed=config.seed,
                best_loss=run.loss,
                design=list(run.best),
                criterion_calls=calls,
                iterations=run.iterations,
                elapsed=elapsed,
                accepted_moves=run.accepted,
                temperature_levels=len(run.trace),
            ))

    _, best_subset, _ = pick_best([(run.loss, run.best) for run, _, _ in outcomes])
    winner = next(run for run, _, _ in outcomes if run.best == best_subset)
    design = Design(best_subset)
    criterion = evaluate_design(cset, instance.model, instance.variant, design, kind)
    total_calls = sum(calls for _, calls, _ in outcomes)
    elapsed = time.time() - t_start
    logger.info(
        f"Anneal {kind.value} k={k}: best={design.as_list()} value={criterion.value:.6g}, "
        f"{total_calls} criterion calls, {elapsed:.2f}s"
    )
    return SearchResult(
        design=design,
        criterion=criterion,
        criterion_calls=total_calls,
        iterations=sum(run.iterations for run, _, _ in outcomes),
        elapsed=elapsed,
        seed=config.seed,
        method="anneal",
        trace=winner.trace,
        restarts=restarts,
    )
