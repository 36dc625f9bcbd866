"""增量选择、序贯设计与增量-减量迭代优化"""

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from krigdes.config.settings import SearchSettings
from krigdes.criteria.functionals import CriterionKind, evaluate_design
from krigdes.design.schemas import Design
from krigdes.design.space import neighbor_table
from krigdes.incremental.update import IncrementSweep, StageState, advance, stage_state
from krigdes.search.anneal import anneal_subset
from krigdes.search.objective import CriterionCounter, DesignObjective, valid_random_design
from krigdes.search.schemas import Instance, SearchResult
from krigdes.telemetry.logger import RestartLog, SearchTelemetry
from krigdes.utils.errors import ConfigError, DesignError, NumericalError, TrendError
from krigdes.utils.helpers import n_choose_k, pick_best

logger = logging.getLogger(__name__)

OBJECTIVES = ("gv", "v", "g")


@dataclass(frozen=True)
class IncrementChoice:
    """选出的增量及其目标值（越大越好）"""

    increment: Tuple[int, ...]
    value: float
    objective: str
    criterion_calls: int
    exhaustive: bool


def select_increment(
    state: StageState,
    l: int,
    objective: str = "gv",
    config: Optional[SearchSettings] = None,
    table: Optional[List[np.ndarray]] = None,
    sweep: Optional[IncrementSweep] = None,
) -> IncrementChoice:
    """
    选择大小为 l 的最优增量

    C(候选数, l) 不超过 config.increment_cap 时穷举取 argmax（并列取字典序最小）；
    否则逐点贪心得到初值，再在增量上做交换退火。

    Args:
        state: 第一阶段状态
        l: 增量大小
        objective: gv / v / g
        config: 搜索参数
        table: 预先计算的邻域表
        sweep: 预先构造的 IncrementSweep

    Returns:
        IncrementChoice
    """
    if objective not in OBJECTIVES:
        raise ConfigError(f"未知的增量目标: {objective}（可选: {', '.join(OBJECTIVES)}）")
    config = config or SearchSettings()
    sweep = sweep or IncrementSweep(state)
    pool = sweep.pool
    if not 1 <= l <= len(pool) - 1:
        raise DesignError(f"增量大小 l={l} 不在 [1, {len(pool) - 1}] 内")

    counter = CriterionCounter()

    def loss_fn(subset: Tuple[int, ...]) -> float:
        counter.tick()
        return -sweep.value(subset, objective)

    total = n_choose_k(len(pool), l)
    if total <= config.increment_cap:
        items = [(loss_fn(c), c) for c in itertools.combinations(pool, l)]
        best_loss, best, _ = pick_best(items)
        return IncrementChoice(best, -best_loss, objective, counter.calls, exhaustive=True)

    chosen: Tuple[int, ...] = ()
    chosen_loss = math.inf
    for _ in range(l):
        step_best, step_loss = None, math.inf
        for c in pool:
            if c in chosen:
                continue
            cand = tuple(sorted(chosen + (c,)))
            cand_loss = loss_fn(cand)
            if step_best is None or cand_loss < step_loss:
                step_best, step_loss = cand, cand_loss
        chosen, chosen_loss = step_best, step_loss

    if table is None:
        table = neighbor_table(state.cset, radius=config.neighborhood_radius, nearest=config.nearest_r)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    run = anneal_subset(loss_fn, chosen, chosen_loss, pool, table, rng, config.anneal, config.max_outer_iters)
    logger.debug(f"Increment l={l} ({objective}): greedy {chosen_loss:.6g} -> annealed {run.loss:.6g}")
    return IncrementChoice(run.best, -run.loss, objective, counter.calls, exhaustive=False)


def sequential_design(
    state: StageState,
    steps: int,
    l: int,
    objective: str = "gv",
    config: Optional[SearchSettings] = None,
) -> Tuple[List[Tuple[int, ...]], StageState]:
    """
    连续做 steps 次大小为 l 的增量，每次都在上一次的结果上重新选择

    Returns:
        (依次选出的增量, 最终状态)
    """
    increments = []
    for _ in range(steps):
        choice = select_increment(state, l, objective, config)
        state = advance(state, choice.increment)
        increments.append(choice.increment)
    return increments, state


def _incr_decr_restart(
    instance: Instance,
    objective: str,
    kind: CriterionKind,
    k_start: int,
    k_target: int,
    step: Optional[int],
    k1: int,
    config: SearchSettings,
    seed_seq: np.random.SeedSequence,
    table: List[np.ndarray],
    start_design: Optional[Design],
) -> Tuple[Design, float, int, int, List[float], float]:
    t_start = time.time()
    rng = np.random.default_rng(seed_seq)
    counter = CriterionCounter()
    cset, model, variant = instance.cset, instance.model, instance.variant
    design_objective = DesignObjective(instance, kind, counter)

    if start_design is None:
        start, _ = valid_random_design(design_objective, rng, k_start)
    else:
        start = start_design
    state = stage_state(cset, start, model, variant)
    # 增量阶段：每次 step 个点，直到 k_target；step 缺省时一次到位
    while state.design.k < k_target:
        remaining = k_target - state.design.k
        size = remaining if step is None else min(step, remaining)
        choice = select_increment(state, size, objective, config, table)
        counter.tick(choice.criterion_calls)
        state = advance(state, choice.increment)

    # 相对于初始 k_target 点设计的准则变化量（GV 为 log 行列式，V 为迹）
    current = 0.0
    trace = [current]
    rounds = 0
    for _ in range(config.incr_decr.rounds):
        rounds += 1
        design = state.design.indices
        if n_choose_k(len(design), k1) <= config.exhaustive_cap:
            subsets = itertools.combinations(design, k1)
        else:
            subsets = (
                tuple(sorted(rng.choice(design, size=k1, replace=False).tolist()))
                for _ in range(config.incr_decr.random_subsets)
            )

        improved = False
        for retained in subsets:
            drop = [d for d in design if d not in retained]
            try:
                reduced = stage_state(cset, Design(tuple(retained)), model, variant)
            except (TrendError, NumericalError):
                continue
            sweep = IncrementSweep(reduced)
            counter.tick()
            decrement = sweep.value(drop, objective)
            if not math.isfinite(decrement):
                continue
            choice = select_increment(reduced, len(drop), objective, config, table, sweep=sweep)
            counter.tick(choice.criterion_calls)
            delta = decrement - choice.value
            if delta < -1e-9 * max(1.0, abs(decrement)):
                state = advance(reduced, choice.increment)
                current += delta
                improved = True
                break
        trace.append(current)
        if not improved:
            break

    final_loss = design_objective.loss(state.design)
    return state.design, final_loss, counter.calls, rounds, trace, time.time() - t_start


def incr_decr_optimize(
    instance: Instance,
    k_target: int,
    config: Optional[SearchSettings] = None,
    kind: CriterionKind = CriterionKind.GV,
    telemetry: Optional[SearchTelemetry] = None,
    start_design: Optional[Design] = None,
) -> SearchResult:
    """
    增量-减量迭代优化

    从最小的起始设计（缺省 k_start = p）出发，按每次 l 个点（缺省一次到位）增量到 k_target，然后反复：
    保留 k1 个点（组合数不超过上限时系统枚举，否则随机抽取），
    在保留设计上重新选择 k_target − k1 个点，准则改进即接受，直到一整轮没有改进。
    GV 只用 l×l 块的行列式，V 只用迹，不做 m×m 运算。

    Args:
        instance: 设计问题
        k_target: 目标设计大小（> p）
        config: 搜索参数
        kind: GV 或 V
        telemetry: 可选的搜索日志
        start_design: 固定的起始设计

    Returns:
        SearchResult
    """
    config = config or SearchSettings()
    idc = config.incr_decr
    if kind not in (CriterionKind.GV, CriterionKind.V):
        raise ConfigError(f"incr_decr 只支持 gv 和 v 准则，当前为 {kind.value}")
    objective = kind.value
    p = instance.p
    if k_target <= p:
        raise DesignError(f"k_target={k_target} 必须大于趋势参数个数 p={p}")
    if k_target > instance.cset.n - 1:
        raise DesignError(f"k_target={k_target} 超过 N-1={instance.cset.n - 1}")

    minimal = max(p, 1)
    k_start = start_design.k if start_design is not None else (idc.k_start or minimal)
    if not minimal <= k_start <= k_target:
        raise DesignError(f"k_start={k_start} 不在 [{minimal}, {k_target}] 内")
    k1 = idc.k1 if idc.k1 is not None else max(p, k_target - 2)
    if not minimal <= k1 < k_target:
        raise DesignError(f"k1={k1} 不在 [{minimal}, {k_target - 1}] 内")
    if idc.l is not None and idc.l < 1:
        raise DesignError(f"incr_decr.l={idc.l} 必须 >= 1")

    t_start = time.time()
    table = neighbor_table(instance.cset, radius=config.neighborhood_radius, nearest=config.nearest_r)
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)

    def _run(i: int):
        return _incr_decr_restart(
            instance, objective, kind, k_start, k_target, idc.l, k1, config, seeds[i], table, start_design
        )

    if config.workers > 1 and config.restarts > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            outcomes = list(executor.map(_run, range(config.restarts)))
    else:
        outcomes = [_run(i) for i in range(config.restarts)]

    restarts = []
    for i, (design, loss, calls, rounds, trace, elapsed) in enumerate(outcomes):
        restarts.append({
            "restart": i,
            "loss": loss,
            "design": design.as_list(),
            "criterion_calls": calls,
            "rounds": rounds,
        })
        if telemetry is not None:
            telemetry.log_restart(RestartLog(
                restart=i,
                seed=config.seed,
                best_loss=loss,
                design=design.as_list(),
                criterion_calls=calls,
                iterations=rounds,
                elapsed=elapsed,
            ))

    _, best, _ = pick_best([(o[1], o[0].indices) for o in outcomes])
    winner = next(o for o in outcomes if o[0].indices == best)
    design = Design(best)
    criterion = evaluate_design(instance.cset, instance.model, instance.variant, design, kind)
    total_calls = sum(o[2] for o in outcomes)
    elapsed = time.time() - t_start
    logger.info(
        f"Incr-decr {kind.value} k={k_target} (k_start={k_start}, k1={k1}): best={design.as_list()} "
        f"value={criterion.value:.6g}, {total_calls} criterion calls, {elapsed:.2f}s"
    )
    return SearchResult(
        design=design,
        criterion=criterion,
        criterion_calls=total_calls,
        iterations=sum(o[3] for o in outcomes),
        elapsed=elapsed,
        seed=config.seed,
        method="incr_decr",
        trace=winner[4],
        restarts=restarts,
    )


def single_increment(
    instance: Instance,
    start: Design,
    l: int,
    objective: str = "gv",
    config: Optional[SearchSettings] = None,
) -> Tuple[Design, IncrementChoice]:
    """从给定设计出发做一次增量，返回新设计"""
    state = stage_state(instance.cset, start, instance.model, instance.variant)
    choice = select_increment(state, l, objective, config)
    enlarged = Design.of(list(start.indices) + list(choice.increment), instance.cset.n)
    return enlarged, choice
