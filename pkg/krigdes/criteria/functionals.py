"""设计准则（GV、G、V、MES）与相对效率"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from krigdes.design.schemas import CandidateSet, Design
from krigdes.design.space import complement
from krigdes.kriging.covariance import CovModel
from krigdes.kriging.linalg import SINGULAR_RTOL, logdet_psd
from krigdes.kriging.system import (
    KrigingSystem,
    KrigingVariant,
    build_system,
    kriging_cov,
    kriging_variances,
)
from krigdes.utils.errors import ConfigError, CriterionMismatchError, DesignError

logger = logging.getLogger(__name__)


class CriterionKind(Enum):
    GV = "gv"
    G = "g"
    V = "v"
    MES = "mes"

    @classmethod
    def from_name(cls, name: str) -> "CriterionKind":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ConfigError(f"未知的准则: {name}（可选: gv, g, v, mes）")

    @property
    def log_scale(self) -> bool:
        return self in (CriterionKind.GV, CriterionKind.MES)

    @property
    def maximize(self) -> bool:
        return self is CriterionKind.MES

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class CriterionValue:
    """
    准则值

    GV、MES 存储为 log 行列式；G、V 为非负实数。
    singular=True 表示 Σ 数值奇异，value 为 -inf 哨兵。
    """

    kind: CriterionKind
    value: float
    m: int = 0
    singular: bool = False

    @property
    def log_scale(self) -> bool:
        return self.kind.log_scale

    @property
    def loss(self) -> float:
        """统一的最小化目标（MES 取负）"""
        return -self.value if self.kind.maximize else self.value

    @property
    def per_point(self) -> Optional[float]:
        """GV 的与 m 无关的逐点值 exp(logdet/m)"""
        if self.kind is not CriterionKind.GV or self.m <= 0:
            return None
        return math.exp(self.value / self.m) if math.isfinite(self.value) else 0.0

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind.value,
            "value": self.value,
            "log_scale": self.log_scale,
            "m": self.m,
            "singular": self.singular,
        }
        if self.per_point is not None:
            out["per_point"] = self.per_point
        return out


def gv_value(sigma: np.ndarray, scale: float, rtol: float = SINGULAR_RTOL) -> CriterionValue:
    """
    GV 准则：log|Σ|

    Args:
        sigma: 克里金协方差矩阵（或其块）
        scale: 奇异判定的绝对量纲，通常为 σ² + τ²

    Returns:
        CriterionValue；Σ 数值奇异时 value=-inf、singular=True
    """
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    logdet, singular = logdet_psd(sigma, scale=scale, rtol=rtol)
    return CriterionValue(CriterionKind.GV, logdet, m=int(sigma.shape[0]), singular=singular)


def g_value(variances: Sequence[float]) -> CriterionValue:
    """G 准则：最大克里金方差"""
    var = np.asarray(variances, dtype=float).reshape(-1)
    return CriterionValue(CriterionKind.G, float(var.max()), m=int(var.size))


def v_value(variances: Sequence[float]) -> CriterionValue:
    """V 准则：平均克里金方差（trace Σ / m）"""
    var = np.asarray(variances, dtype=float).reshape(-1)
    return CriterionValue(CriterionKind.V, float(var.mean()), m=int(var.size))


def mes_value(system: KrigingSystem) -> CriterionValue:
    """MES 准则：log|C_ξ|（越大越好）"""
    return CriterionValue(CriterionKind.MES, system.logdet_c(), m=system.k)


def gv_relative(system: KrigingSystem) -> float:
    """
    与 m 无关的 GV 等价量

    log|Σ| = log|C_X| + log|M_X| − log|C_ξ| − log|M_ξ|，M = FᵀC⁻¹F，前两项只依赖候选集合。
    返回 −(log|C_ξ| + log|M_ξ|)，与 log|Σ| 只差一个常数，O(k³) 计算。
    """
    value = -system.logdet_c()
    if system.m_chol is not None:
        value -= system.m_chol.logdet()
    return value


def criterion_of(system: KrigingSystem, kind: CriterionKind, targets: Sequence[int]) -> CriterionValue:
    """在已构造的系统上计算准则"""
    if kind is CriterionKind.MES:
        return mes_value(system)
    if kind is CriterionKind.GV:
        return gv_value(kriging_cov(system, targets), scale=system.model.sill)
    variances = kriging_variances(system, targets)
    return g_value(variances) if kind is CriterionKind.G else v_value(variances)


def evaluate_design(
    cset: CandidateSet,
    model: CovModel,
    variant: KrigingVariant,
    design: Design,
    kind: CriterionKind,
    targets: Optional[Sequence[int]] = None,
) -> CriterionValue:
    """
    独立重算设计的准则值（审计、搜索结果、效率表都走这一路径）

    targets 缺省为全部非设计点。
    """
    system = build_system(cset, design, model, variant)
    if targets is None:
        targets = complement(design, cset.n)
    return criterion_of(system, kind, targets)


def relative_efficiency(optimum: CriterionValue, value: CriterionValue) -> float:
    """
    相对效率 E = Φ(ξ_opt) / Φ(ξ)

    GV 的泛函取 √|Σ|：E = exp(0.5·(logdet_opt − logdet))；
    MES 为最大化准则：E = exp(0.5·(logdet − logdet_opt))。
    """
    if optimum.kind is not value.kind:
        raise CriterionMismatchError(f"准则类型不一致: {optimum.kind.value} vs {value.kind.value}")
    if optimum.m != value.m:
        raise CriterionMismatchError(f"预测点数不一致: m={optimum.m} vs m={value.m}")

    if optimum.kind.log_scale:
        diff = optimum.value - value.value
        if optimum.kind.maximize:
            diff = -diff
        if math.isnan(diff):
            # 两者都是 -inf
            return 1.0
        if diff == math.inf:
            raise DesignError(
                f"{optimum.kind.label} 的参照值 {optimum.value} 不是最优：设计值为 {value.value}"
            )
        return math.exp(0.5 * diff) if diff < 700 else math.inf
    if value.value == 0.0:
        if optimum.value == 0.0:
            return 1.0
        raise DesignError(f"{optimum.kind.label} 的参照值 {optimum.value} 不是最优：设计值为 0")
    return optimum.value / value.value


def scale_to_unit_gv(logdet: float, m: int) -> float:
    """使参考设计的 |Σ| 等于1的方差缩放因子 s²：logdet + m·log s² = 0"""
    if m <= 0:
        raise ValueError("m 必须为正")
    return math.exp(-logdet / m)


def cross_efficiency(
    values_by_design: Mapping[str, Mapping[CriterionKind, CriterionValue]],
    optima: Optional[Mapping[CriterionKind, CriterionValue]] = None,
) -> List[Dict[str, float]]:
    """
    交叉效率表：行为设计，列为 E_GV、E_G、E_V（以及 E_MES，若提供）

    Args:
        values_by_design: {设计名: {准则: 该设计上的准则值}}
        optima: 每个准则的最优值；缺省取所给设计中的最优

    Returns:
        [{"design": 名称, "E_GV": ..., "E_G": ..., "E_V": ...}, ...]
    """
    kinds = [k for k in CriterionKind if all(k in v for v in values_by_design.values())]
    best: Dict[CriterionKind, CriterionValue] = dict(optima or {})
    for kind in kinds:
        if kind not in best:
            best[kind] = min((v[kind] for v in values_by_design.values()), key=lambda c: c.loss)

    rows = []
    for name, values in values_by_design.items():
        row: Dict[str, float] = {"design": name}
        for kind in kinds:
            row[f"E_{kind.label}"] = relative_efficiency(best[kind], values[kind])
        rows.append(row)
    return rows
