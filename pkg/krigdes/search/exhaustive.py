"""穷举搜索：所有最优性测试背后的暴力 oracle"""

import itertools
import logging
import time
from typing import Iterator, Optional, Tuple

from krigdes.criteria.functionals import CriterionKind, CriterionValue, criterion_of
from krigdes.design.schemas import Design
from krigdes.design.space import complement
from krigdes.kriging.system import build_system
from krigdes.search.schemas import Instance, SearchResult
from krigdes.utils.errors import CapacityError, DesignError, NumericalError, TrendError
from krigdes.utils.helpers import n_choose_k, pick_best

logger = logging.getLogger(__name__)

DEFAULT_CAP = 200_000


def enumerate_designs(
    instance: Instance,
    kind: CriterionKind,
    k: int,
    cap: int = DEFAULT_CAP,
) -> Iterator[Tuple[Design, Optional[CriterionValue]]]:
    """
    按字典序枚举全部 k 点设计及其准则值（直接计算，GV 为 m×m 行列式）

    不可识别的设计给出 None。
    """
    n = instance.cset.n
    if not 1 <= k <= n - 1:
        raise DesignError(f"k={k} 不在 [1, {n - 1}] 内")
    total = n_choose_k(n, k)
    if total > cap:
        raise CapacityError(f"C({n},{k})={total} 超过穷举上限 {cap}")

    for combo in itertools.combinations(range(n), k):
        design = Design(tuple(combo))
        try:
            system = build_system(instance.cset, design, instance.model, instance.variant)
        except (TrendError, NumericalError):
            yield design, None
            continue
        yield design, criterion_of(system, kind, complement(design, n))


def exhaustive_optimal(
    instance: Instance,
    kind: CriterionKind,
    k: int,
    cap: int = DEFAULT_CAP,
    tol: float = 1e-9,
) -> SearchResult:
    """
    全局最优设计及完整的并列集合

    Args:
        instance: 设计问题
        kind: 准则
        k: 设计大小
        cap: C(N, k) 上限
        tol: 并列的相对容差

    Returns:
        SearchResult（ties 为全部并列最优设计，design 为其中字典序最小者）
    """
    start = time.time()
    items = []
    values = {}
    calls = 0
    for design, value in enumerate_designs(instance, kind, k, cap):
        calls += 1
        if value is None:
            continue
        items.append((value.loss, design.indices))
        values[design.indices] = value
    if not items:
        raise TrendError(f"没有可识别的 {k} 点设计")

    best_loss, best, ties = pick_best(items, tol=tol)
    elapsed = time.time() - start
    logger.info(
        f"Exhaustive {kind.value} k={k}: {calls} designs, best={best} loss={best_loss:.6g}, "
        f"{len(ties)} tie(s), {elapsed:.2f}s"
    )
    return SearchResult(
        design=Design(best),
        criterion=values[best],
        criterion_calls=calls,
        iterations=calls,
        elapsed=elapsed,
        method="exhaustive",
        ties=list(ties),
    )

