"""搜索用的设计目标函数与准则调用计数"""

import logging
import math
from threading import Lock
from typing import Optional, Tuple

import numpy as np

from krigdes.criteria.functionals import CriterionKind, gv_relative
from krigdes.design.schemas import Design
from krigdes.design.space import complement
from krigdes.kriging.system import KrigingSystem, build_system, kriging_variances
from krigdes.search.schemas import Instance
from krigdes.utils.errors import NumericalError, TrendError

logger = logging.getLogger(__name__)


class CriterionCounter:
    """准则函数调用计数器（线程安全）"""

    def __init__(self):
        self._calls = 0
        self._lock = Lock()

    def tick(self, n: int = 1) -> None:
        with self._lock:
            self._calls += n

    @property
    def calls(self) -> int:
        return self._calls


class DesignObjective:
    """
    固定大小设计的损失函数（越小越好）

    - GV：gv_relative，与 log|Σ| 只差一个常数，不做 m×m 的运算
    - G / V：非设计点克里金方差的最大值 / 平均值，O(k·m)
    - MES：-log|C_ξ|

    趋势不可识别或协方差奇异的设计损失为 +inf。
    """

    def __init__(self, instance: Instance, kind: CriterionKind, counter: Optional[CriterionCounter] = None):
        self.instance = instance
        self.kind = kind
        self.counter = counter or CriterionCounter()

    @property
    def calls(self) -> int:
        return self.counter.calls

    def build(self, design: Design) -> Optional[KrigingSystem]:
        inst = self.instance
        try:
            return build_system(inst.cset, design, inst.model, inst.variant)
        except (TrendError, NumericalError) as e:
            logger.debug(f"Invalid design {design.as_list()}: {e}")
            return None

    def loss_of(self, system: KrigingSystem) -> float:
        if self.kind is CriterionKind.GV:
            return gv_relative(system)
        if self.kind is CriterionKind.MES:
            return -system.logdet_c()
        variances = kriging_variances(system, complement(system.design, self.instance.cset.n))
        if self.kind is CriterionKind.G:
            return float(variances.max())
        return float(variances.mean())

    def evaluate(self, design: Design) -> Tuple[float, Optional[KrigingSystem]]:
        """一次准则调用：返回 (loss, system)；无效设计返回 (inf, None)"""
        self.counter.tick()
        system = self.build(design)
        if system is None:
            return math.inf, None
        return self.loss_of(system), system

    def loss(self, design: Design) -> float:
        return self.evaluate(design)[0]


def random_design(rng: np.random.Generator, n: int, k: int) -> Design:
    """均匀无放回抽取 k 个候选点"""
    return Design.of(rng.choice(n, size=k, replace=False).tolist(), n)


def valid_random_design(
    objective: DesignObjective,
    rng: np.random.Generator,
    k: int,
    attempts: int = 100,
) -> Tuple[Design, float]:
    """抽取损失有限的随机起始设计"""
    n = objective.instance.cset.n
    for _ in range(attempts):
        design = random_design(rng, n, k)
        loss = objective.loss(design)
        if math.isfinite(loss):
            return design, loss
    raise TrendError(f"{attempts} 次随机抽样都没有得到可识别的 {k} 点设计")
