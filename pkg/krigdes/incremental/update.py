"""两阶段更新公式：增量块 Σ₂、增量目标函数、权重与协方差更新、行列式链式记账

记号：ξ₁ 为当前设计（k 点），increment 为 l 个新增点，targets 为其余预测点（m 个）。
Σ₂ = Σ(inc, inc)，Σ₂₀ = Σ(inc, targets)，Σ₀ = Σ(targets, targets)，均为第一阶段的克里金协方差块。

  W₂  = Σ₂₀ᵀ Σ₂⁻¹
  W₁  = W₁₀ − W₂ W₁₂
  Σ₀⁺ = Σ₀ − Σ₂₀ᵀ Σ₂⁻¹ Σ₂₀
  log|Σ⁺| = log|Σ| − log|Σ₂|
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from krigdes.design.schemas import CandidateSet, Design
from krigdes.design.space import complement
from krigdes.kriging.covariance import CovModel, cov_matrix
from krigdes.kriging.linalg import logdet_psd, psd_factor
from krigdes.kriging.system import (
    KrigingSystem,
    KrigingVariant,
    build_system,
    half_factors,
    kriging_cov,
    kriging_cov_between,
    kriging_variances,
    weights,
)
from krigdes.utils.errors import DesignError, SingularModelError, UntrackedStateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StageState:
    """
    第一阶段状态

    logdet_d 为全部非设计点上克里金协方差的 log 行列式；只做相对比较时可以不跟踪（None）。
    """

    system: KrigingSystem
    logdet_d: Optional[float] = None

    @property
    def design(self) -> Design:
        return self.system.design

    @property
    def cset(self) -> CandidateSet:
        return self.system.cset

    @property
    def model(self) -> CovModel:
        return self.system.model

    @property
    def variant(self) -> KrigingVariant:
        return self.system.variant

    @property
    def tracked(self) -> bool:
        return self.logdet_d is not None

    def non_design(self) -> list:
        return complement(self.design, self.cset.n)

    def with_logdet(self, logdet_d: Optional[float]) -> "StageState":
        return replace(self, logdet_d=logdet_d)


@dataclass(frozen=True)
class KrigingCovBlocks:
    """按增量划分的第一阶段克里金协方差块"""

    sigma2: np.ndarray
    sigma20: Optional[np.ndarray] = None
    sigma0: Optional[np.ndarray] = None

    def assemble(self) -> np.ndarray:
        """[[Σ₂, Σ₂₀], [Σ₂₀ᵀ, Σ₀]]"""
        if self.sigma20 is None or self.sigma0 is None:
            raise ValueError("组装整块矩阵需要 Σ₂₀ 和 Σ₀")
        return np.block([[self.sigma2, self.sigma20], [self.sigma20.T, self.sigma0]])


@dataclass(frozen=True)
class UpdatedWeights:
    """第二阶段权重 [W₁ W₂]，列顺序为 ξ₁ 之后接 increment"""

    w1: np.ndarray
    w2: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.hstack([self.w1, self.w2])


def stage_state(
    cset: CandidateSet,
    design: Design,
    model: CovModel,
    variant: KrigingVariant,
    track_logdet: bool = False,
) -> StageState:
    """
    构造第一阶段状态

    track_logdet=True 时做一次 m×m 的完整计算得到 logdet_d，之后的增量、减量只做链式记账。
    """
    system = build_system(cset, design, model, variant)
    logdet_d = None
    if track_logdet:
        sigma = kriging_cov(system, complement(design, cset.n))
        logdet_d, singular = logdet_psd(sigma, scale=model.sill)
        if singular:
            logger.warning(f"Stage-one kriging covariance is singular for design {design.as_list()}")
    return StageState(system=system, logdet_d=logdet_d)


def _check_increment(state: StageState, increment: Sequence[int]) -> list:
    inc = [int(i) for i in increment]
    if len(set(inc)) != len(inc):
        raise DesignError(f"增量中有重复点: {inc}")
    bad = [i for i in inc if i < 0 or i >= state.cset.n]
    if bad:
        raise DesignError(f"增量下标越界 [0, {state.cset.n}): {bad}")
    overlap = [i for i in inc if i in state.design]
    if overlap:
        raise DesignError(f"增量与当前设计重叠: {overlap}")
    return inc


def _stage_targets(state: StageState, inc: Sequence[int], targets: Optional[Sequence[int]]) -> list:
    if targets is None:
        taken = set(state.design.indices) | set(inc)
        return [i for i in range(state.cset.n) if i not in taken]
    targets = [int(t) for t in targets]
    clash = (set(state.design.indices) | set(inc)) & set(targets)
    if clash:
        raise DesignError(f"预测点与 ξ₁ ∪ increment 重叠: {sorted(clash)}")
    return targets


def sigma2_block(state: StageState, increment: Sequence[int]) -> np.ndarray:
    """增量点上的 l×l 克里金协方差块 Σ₂；只用 k、l、p 规模的矩阵"""
    inc = _check_increment(state, increment)
    return kriging_cov_between(state.system, inc, inc)


def cov_blocks(
    state: StageState,
    increment: Sequence[int],
    targets: Optional[Sequence[int]] = None,
    with_sigma0: bool = False,
) -> KrigingCovBlocks:
    """Σ₂、Σ₂₀ 以及可选的 Σ₀（m×m，仅在显式请求时计算）"""
    inc = _check_increment(state, increment)
    targets = _stage_targets(state, inc, targets)
    sigma2 = kriging_cov_between(state.system, inc, inc)
    sigma20 = kriging_cov_between(state.system, inc, targets)
    sigma0 = kriging_cov(state.system, targets) if with_sigma0 else None
    return KrigingCovBlocks(sigma2=sigma2, sigma20=sigma20, sigma0=sigma0)


def gv_increment_objective(state: StageState, increment: Sequence[int]) -> float:
    """
    log|Σ₂|，越大越好

    最大化它等价于最小化第二阶段的 GV；Σ₂ 奇异时返回 -inf，这样的增量不会被选中。
    """
    sigma2 = sigma2_block(state, increment)
    logdet, _ = logdet_psd(sigma2, scale=state.model.sill)
    return logdet


def v_increment_objective(
    state: StageState,
    increment: Sequence[int],
    targets: Optional[Sequence[int]] = None,
) -> float:
    """tr Σ₂ + tr(Σ₂⁻¹Σ₂₀Σ₂₀ᵀ)，越大越好；代价对 m 线性"""
    blocks = cov_blocks(state, increment, targets)
    factor = psd_factor(blocks.sigma2, scale=state.model.sill)
    if factor is None:
        return -np.inf
    q = factor.half_solve(blocks.sigma20)
    return float(np.trace(blocks.sigma2) + np.sum(q * q))


def g_increment_objective(
    state: StageState,
    increment: Sequence[int],
    targets: Optional[Sequence[int]] = None,
) -> float:
    """-max diag(Σ₀ − Σ₂₀ᵀΣ₂⁻¹Σ₂₀)，越大越好"""
    inc = _check_increment(state, increment)
    targets = _stage_targets(state, inc, targets)
    sigma2 = kriging_cov_between(state.system, inc, inc)
    factor = psd_factor(sigma2, scale=state.model.sill)
    if factor is None:
        return -np.inf
    if not targets:
        return 0.0
    q = factor.half_solve(kriging_cov_between(state.system, inc, targets))
    var = kriging_variances(state.system, targets) - np.sum(q * q, axis=0)
    return -float(var.max())


class IncrementSweep:
    """
    在同一个 ξ₁ 上批量评估候选增量

    候选池各点的 L⁻¹C 列、L_M⁻¹R 列和第一阶段方差只算一次，之后每个增量只做 l 规模的运算
    （V、G 目标另需对 m 线性的一步）。
    """

    def __init__(self, state: StageState, pool: Optional[Sequence[int]] = None):
        self.state = state
        self.pool = list(state.non_design() if pool is None else pool)
        overlap = [i for i in self.pool if i in state.design]
        if overlap:
            raise DesignError(f"候选池与当前设计重叠: {overlap}")
        self._pos = {c: j for j, c in enumerate(self.pool)}
        v, q = half_factors(state.system, self.pool)
        self._v = v
        self._q = q
        var = state.model.sill - np.einsum("ij,ij->j", v, v)
        if q is not None:
            var = var + np.einsum("ij,ij->j", q, q)
        self._var = var

    def _cols(self, points: Sequence[int]) -> list:
        try:
            return [self._pos[int(i)] for i in points]
        except KeyError as e:
            raise DesignError(f"点 {e.args[0]} 不在候选池中") from e

    def _between(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        r, c = self._cols(rows), self._cols(cols)
        prior = cov_matrix(self.state.model, self.state.cset, rows, cols)
        sigma = prior - self._v[:, r].T @ self._v[:, c]
        if self._q is not None:
            sigma = sigma + self._q[:, r].T @ self._q[:, c]
        return sigma

    def sigma2(self, increment: Sequence[int]) -> np.ndarray:
        inc = list(increment)
        s = self._between(inc, inc)
        return 0.5 * (s + s.T)

    def gv(self, increment: Sequence[int]) -> float:
        logdet, _ = logdet_psd(self.sigma2(increment), scale=self.state.model.sill)
        return logdet

    def _reduced(self, increment: Sequence[int]):
        inc = list(increment)
        factor = psd_factor(self.sigma2(inc), scale=self.state.model.sill)
        if factor is None:
            return None, None, None
        taken = set(inc)
        rest = [c for c in self.pool if c not in taken]
        q = factor.half_solve(self._between(inc, rest))
        return factor, rest, q

    def v(self, increment: Sequence[int]) -> float:
        factor, _, q = self._reduced(increment)
        if factor is None:
            return -np.inf
        return float(np.trace(self.sigma2(increment)) + np.sum(q * q))

    def g(self, increment: Sequence[int]) -> float:
        factor, rest, q = self._reduced(increment)
        if factor is None:
            return -np.inf
        if not rest:
            return 0.0
        var = self._var[self._cols(rest)] - np.sum(q * q, axis=0)
        return -float(var.max())

    def value(self, increment: Sequence[int], objective: str) -> float:
        """objective ∈ {gv, v, g}，越大越好"""
        if objective == "gv":
            return self.gv(increment)
        if objective == "v":
            return self.v(increment)
        if objective == "g":
            return self.g(increment)
        raise ValueError(f"未知的增量目标: {objective}（可选: gv, v, g）")


def _sigma2_factor(state: StageState, inc: Sequence[int], sigma2: np.ndarray):
    factor = psd_factor(sigma2, scale=state.model.sill)
    if factor is None:
        raise SingularModelError(f"增量 {list(inc)} 的 Σ₂ 块奇异，无法更新")
    return factor


def update_weights(
    state: StageState,
    increment: Sequence[int],
    targets: Sequence[int],
) -> UpdatedWeights:
    """
    第二阶段权重

    W₂ = Σ₂₀ᵀΣ₂⁻¹，W₁ = W₁₀ − W₂W₁₂
    """
    inc = _check_increment(state, increment)
    targets = _stage_targets(state, inc, targets)
    w10 = weights(state.system, targets)
    if not inc:
        return UpdatedWeights(w1=w10, w2=np.zeros((len(targets), 0)))

    sigma2 = kriging_cov_between(state.system, inc, inc)
    sigma20 = kriging_cov_between(state.system, inc, targets)
    factor = _sigma2_factor(state, inc, sigma2)
    w2 = factor.solve(sigma20).T
    w12 = weights(state.system, inc)
    return UpdatedWeights(w1=w10 - w2 @ w12, w2=w2)


def update_kriging_cov(
    state: StageState,
    increment: Sequence[int],
    targets: Sequence[int],
) -> np.ndarray:
    """Σ₀⁺ = Σ₀ − Σ₂₀ᵀΣ₂⁻¹Σ₂₀"""
    inc = _check_increment(state, increment)
    targets = _stage_targets(state, inc, targets)
    sigma0 = kriging_cov(state.system, targets)
    if not inc:
        return sigma0
    sigma2 = kriging_cov_between(state.system, inc, inc)
    factor = _sigma2_factor(state, inc, sigma2)
    q = factor.half_solve(kriging_cov_between(state.system, inc, targets))
    updated = sigma0 - q.T @ q
    return 0.5 * (updated + updated.T)


def _reduced_design(state: StageState, inc: Sequence[int], drop: Sequence[int]) -> Tuple[Design, list]:
    enlarged = set(state.design.indices) | set(inc)
    drop = [int(d) for d in drop]
    missing = [d for d in drop if d not in enlarged]
    if missing:
        raise DesignError(f"减量点不在 ξ₁ ∪ increment 中: {missing}")
    if len(set(drop)) != len(drop):
        raise DesignError(f"减量中有重复点: {drop}")
    return Design.of(sorted(enlarged - set(drop)), state.cset.n), drop


def decrement_logdet(system: KrigingSystem, drop: Sequence[int]) -> float:
    """log|Σ₂*|：被移除点在缩减设计上的克里金协方差块"""
    drop = list(drop)
    if not drop:
        return 0.0
    sigma2 = kriging_cov_between(system, drop, drop)
    logdet, _ = logdet_psd(sigma2, scale=system.model.sill)
    return logdet


def chain_logdet(
    state: StageState,
    increment: Sequence[int],
    drop: Sequence[int] = (),
) -> float:
    """
    行列式链式记账

    log|Σ⁺| = logdet_d − log|Σ₂(ξ₁, inc)| + log|Σ₂*(ξ', drop)|，ξ' = (ξ₁ ∪ inc) \\ drop。
    Σ₂* 在缩减设计上重新构造系统计算。
    """
    if state.logdet_d is None:
        raise UntrackedStateError("StageState 没有跟踪 logdet，无法链式更新")
    inc = _check_increment(state, increment)
    value = state.logdet_d
    if inc:
        gain = gv_increment_objective(state, inc)
        if not np.isfinite(gain):
            raise SingularModelError(f"增量 {inc} 的 Σ₂ 块奇异，无法链式更新")
        value -= gain
    if drop:
        reduced, drop = _reduced_design(state, inc, drop)
        reduced_system = build_system(state.cset, reduced, state.model, state.variant)
        value += decrement_logdet(reduced_system, drop)
    return float(value)


def advance(
    state: StageState,
    increment: Sequence[int],
    drop: Sequence[int] = (),
) -> StageState:
    """
    应用增量与减量，返回 (ξ₁ ∪ inc) \\ drop 上的新状态

    基础系统重新构造（不做分解的降秩更新）；跟踪 logdet 时按链式记账延续。
    """
    inc = _check_increment(state, increment)
    reduced, drop = _reduced_design(state, inc, drop)
    if not inc and not drop:
        return state
    system = build_system(state.cset, reduced, state.model, state.variant)
    logdet_d = None
    if state.tracked:
        logdet_d = state.logdet_d
        if inc:
            gain = gv_increment_objective(state, inc)
            if not np.isfinite(gain):
                raise SingularModelError(f"增量 {inc} 的 Σ₂ 块奇异，无法链式更新")
            logdet_d -= gain
        if drop:
            logdet_d += decrement_logdet(system, drop)
    logger.debug(
        f"Advanced design k={state.design.k} -> {reduced.k} (+{len(inc)}, -{len(drop)}), logdet={logdet_d}"
    )
    return StageState(system=system, logdet_d=logdet_d)
