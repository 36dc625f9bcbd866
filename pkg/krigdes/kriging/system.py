"""克里金系统：固定设计上的 BLUP 权重与克里金协方差

记号：C = C_ξ（k×k），F = F_ξ（k×p），M = FᵀC⁻¹F，
B = M⁻¹FᵀC⁻¹，A = C⁻¹(I − FB)，W = F₀B + C_{ξ0}ᵀA。

所有求解都走缓存的三角因子；m×m 的 Σ 只在显式请求时构造。
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg as la

from krigdes.design.schemas import BasisKind, CandidateSet, Design, TrendBasis
from krigdes.design.space import basis_matrix
from krigdes.kriging.covariance import CovModel, cov_matrix
from krigdes.kriging.linalg import CholFactor, jitter_cholesky
from krigdes.utils.errors import TrendError

logger = logging.getLogger(__name__)


class VariantKind(Enum):
    SIMPLE = "simple"
    ORDINARY = "ordinary"
    UNIVERSAL = "universal"


@dataclass(frozen=True)
class KrigingVariant:
    """克里金类型：简单（已知均值）、普通、泛克里金（给定趋势基）

    简单克里金的 known_mean 可以是常数，也可以是按候选点下标排列的均值向量。
    """

    kind: VariantKind = VariantKind.ORDINARY
    basis: Optional[TrendBasis] = None
    known_mean: Union[float, Tuple[float, ...]] = 0.0

    @classmethod
    def simple(cls, known_mean: Union[float, Sequence[float]] = 0.0) -> "KrigingVariant":
        if np.ndim(known_mean) == 0:
            return cls(kind=VariantKind.SIMPLE, known_mean=float(known_mean))
        return cls(kind=VariantKind.SIMPLE, known_mean=tuple(float(v) for v in np.ravel(known_mean)))

    @classmethod
    def ordinary(cls) -> "KrigingVariant":
        return cls(kind=VariantKind.ORDINARY)

    @classmethod
    def universal(cls, basis: TrendBasis) -> "KrigingVariant":
        return cls(kind=VariantKind.UNIVERSAL, basis=basis)

    @classmethod
    def from_name(
        cls,
        name: str,
        basis: Optional[TrendBasis] = None,
        known_mean: Union[float, Sequence[float]] = 0.0,
    ):
        name = name.lower()
        if name == "simple":
            return cls.simple(known_mean)
        if name == "ordinary":
            return cls.ordinary()
        if name == "universal":
            if basis is None:
                raise TrendError("universal 克里金需要指定趋势基")
            return cls.universal(basis)
        raise TrendError(f"未知的克里金类型: {name}（可选: simple, ordinary, universal）")

    @property
    def trend_basis(self) -> Optional[TrendBasis]:
        """实际使用的趋势基；简单克里金没有趋势"""
        if self.kind is VariantKind.SIMPLE:
            return None
        if self.kind is VariantKind.ORDINARY:
            return TrendBasis(kind=BasisKind.CONSTANT)
        return self.basis

    @property
    def is_ordinary(self) -> bool:
        basis = self.trend_basis
        return basis is not None and basis.kind is BasisKind.CONSTANT

    def p(self, dim: int) -> int:
        basis = self.trend_basis
        return 0 if basis is None else basis.p(dim)

    def mean_at(self, indices: Sequence[int], n: int) -> np.ndarray:
        """候选点 indices 处的已知均值；常数均值广播到每个点"""
        mean = np.asarray(self.known_mean, dtype=float)
        if mean.ndim == 0:
            return np.full(len(indices), float(mean))
        if mean.shape[0] != n:
            raise ValueError(f"known_mean 长度 {mean.shape[0]} 与候选点数 N={n} 不一致")
        return mean[np.asarray(indices, dtype=int)]

    def describe(self) -> str:
        if self.kind is VariantKind.SIMPLE:
            if isinstance(self.known_mean, tuple):
                return f"simple(mean=vector[{len(self.known_mean)}])"
            return f"simple(mean={self.known_mean:g})"
        if self.kind is VariantKind.ORDINARY:
            return "ordinary"
        return f"universal({self.basis.describe()})"


@dataclass(frozen=True, eq=False)
class KrigingSystem:
    """固定设计 ξ 上的分解缓存；构造后只读，可被多个线程同时读取"""

    cset: CandidateSet
    design: Design
    model: CovModel
    variant: KrigingVariant
    chol: CholFactor
    F: np.ndarray
    B: np.ndarray
    A: np.ndarray
    half_F: np.ndarray  # L⁻¹F
    m_chol: Optional[CholFactor] = field(default=None)

    @property
    def k(self) -> int:
        return self.design.k

    @property
    def p(self) -> int:
        return int(self.F.shape[1])

    @property
    def indices(self):
        return self.design.as_list()

    def logdet_c(self) -> float:
        """log |C_ξ|（MES 准则）"""
        return self.chol.logdet()

    def cross_cov(self, targets: Sequence[int]) -> np.ndarray:
        """C_{ξ,targets}（k×|targets|）"""
        return cov_matrix(self.model, self.cset, self.indices, targets)

    def trend_rows(self, targets: Sequence[int]) -> np.ndarray:
        """F_targets（|targets|×p）"""
        basis = self.variant.trend_basis
        if basis is None:
            return np.zeros((len(targets), 0))
        return basis_matrix(basis, self.cset, targets)


def build_system(
    cset: CandidateSet,
    design: Design,
    model: CovModel,
    variant: KrigingVariant,
) -> KrigingSystem:
    """
    构造克里金系统

    Args:
        cset: 候选集合
        design: 设计 ξ
        model: 协方差模型
        variant: 克里金类型

    Returns:
        KrigingSystem

    Raises:
        TrendError: k < p 或 F_ξ 列秩亏
        SingularModelError: C_ξ 加 jitter 后仍不正定
    """
    idx = design.as_list()
    k = len(idx)
    cov = cov_matrix(model, cset, idx, idx)
    chol = jitter_cholesky(cov, scale=model.sigma2)
    eye = np.eye(k)

    basis = variant.trend_basis
    if basis is None:
        a_mat = chol.solve(eye)
        return KrigingSystem(
            cset=cset,
            design=design,
            model=model,
            variant=variant,
            chol=chol,
            F=np.zeros((k, 0)),
            B=np.zeros((0, k)),
            A=0.5 * (a_mat + a_mat.T),
            half_F=np.zeros((k, 0)),
        )

    f_mat = basis_matrix(basis, cset, idx)
    p = f_mat.shape[1]
    if k < p:
        raise TrendError(f"设计点数 k={k} 小于趋势参数个数 p={p}，趋势不可识别")
    if np.linalg.matrix_rank(f_mat) < p:
        raise TrendError(f"F_ξ 列秩亏（p={p}），趋势不可识别")

    half_f = chol.half_solve(f_mat)
    m_mat = half_f.T @ half_f
    try:
        m_chol = CholFactor(lower=la.cholesky(0.5 * (m_mat + m_mat.T), lower=True))
    except la.LinAlgError as e:
        raise TrendError(f"FᵀC⁻¹F 不正定（p={p}），趋势不可识别") from e

    cinv_f = chol.solve(f_mat)
    b_mat = m_chol.solve(cinv_f.T)
    a_mat = chol.solve(eye) - cinv_f @ b_mat
    return KrigingSystem(
        cset=cset,
        design=design,
        model=model,
        variant=variant,
        chol=chol,
        F=f_mat,
        B=b_mat,
        A=0.5 * (a_mat + a_mat.T),
        half_F=half_f,
        m_chol=m_chol,
    )


def weights(system: KrigingSystem, targets: Sequence[int]) -> np.ndarray:
    """
    权重矩阵 W（m×k），第 i 行是预测 targets[i] 时各设计点观测的权重

    目标点与设计点重合时给出精确插值权重（该设计点权重为1）。
    """
    cross = system.cross_cov(targets)
    if system.p == 0:
        return system.chol.solve(cross).T
    return system.trend_rows(targets) @ system.B + cross.T @ system.A


def half_factors(system: KrigingSystem, points: Sequence[int]):
    """(L⁻¹C_{ξ,points}, L_M⁻¹ Rᵀ)，R = F_points − (L⁻¹C)ᵀ(L⁻¹F)"""
    v = system.chol.half_solve(system.cross_cov(points))
    if system.p == 0:
        return v, None
    resid = system.trend_rows(points) - v.T @ system.half_F
    q = system.m_chol.half_solve(resid.T)
    return v, q


def kriging_cov_between(
    system: KrigingSystem,
    rows: Sequence[int],
    cols: Sequence[int],
) -> np.ndarray:
    """
    克里金协方差的 rows×cols 块

    Σ = C₀ − VᵀV + RM⁻¹Rᵀ，V = L⁻¹C_{ξ0}；不构造 rows ∪ cols 上的整块矩阵。
    """
    rows = list(rows)
    cols = list(cols)
    if not rows or not cols:
        return np.zeros((len(rows), len(cols)))
    same = rows == cols
    v_r, q_r = half_factors(system, rows)
    v_c, q_c = (v_r, q_r) if same else half_factors(system, cols)
    prior = cov_matrix(system.model, system.cset, rows, cols)
    sigma = prior - v_r.T @ v_c
    if q_r is not None:
        sigma = sigma + q_r.T @ q_c
    if same:
        sigma = 0.5 * (sigma + sigma.T)
    return sigma


def kriging_cov(system: KrigingSystem, targets: Sequence[int]) -> np.ndarray:
    """目标点上的 m×m 克里金协方差矩阵（对称半正定）"""
    return kriging_cov_between(system, targets, targets)


def kriging_variances(system: KrigingSystem, targets: Sequence[int]) -> np.ndarray:
    """克里金方差 diag Σ，O(k·m)，不构造 Σ"""
    targets = list(targets)
    if not targets:
        return np.zeros(0)
    v, q = half_factors(system, targets)
    var = system.model.sill - np.einsum("ij,ij->j", v, v)
    if q is not None:
        var = var + np.einsum("ij,ij->j", q, q)
    return np.maximum(var, 0.0)


def conditional_cov(system: KrigingSystem, targets: Sequence[int]) -> np.ndarray:
    """Cov(Y₀ | Y_ξ) = C₀ − C_{ξ0}ᵀC_ξ⁻¹C_{ξ0}，即简单克里金协方差"""
    targets = list(targets)
    v = system.chol.half_solve(system.cross_cov(targets))
    sigma = cov_matrix(system.model, system.cset, targets, targets) - v.T @ v
    return 0.5 * (sigma + sigma.T)


@dataclass(frozen=True)
class OrdinaryParts:
    """Σ_OK = Σ_SK + r rᵀ / b"""

    sigma_sk: np.ndarray
    correction: np.ndarray
    b: float
    r: np.ndarray

    def assemble(self) -> np.ndarray:
        return self.sigma_sk + self.correction


def kriging_cov_ok_parts(system: KrigingSystem, targets: Sequence[int]) -> OrdinaryParts:
    """
    普通克里金协方差的分解：简单克里金部分加秩1修正

    b = 𝟙ᵀC_ξ⁻¹𝟙，r = 𝟙 − C_{ξ0}ᵀC_ξ⁻¹𝟙
    """
    if not system.variant.is_ordinary:
        raise TrendError(f"kriging_cov_ok_parts 只适用于普通克里金，当前为 {system.variant.describe()}")
    targets = list(targets)
    half_one = system.chol.half_solve(np.ones(system.k))
    b = float(half_one @ half_one)
    v = system.chol.half_solve(system.cross_cov(targets))
    r = 1.0 - v.T @ half_one
    sigma_sk = cov_matrix(system.model, system.cset, targets, targets) - v.T @ v
    sigma_sk = 0.5 * (sigma_sk + sigma_sk.T)
    return OrdinaryParts(sigma_sk=sigma_sk, correction=np.outer(r, r) / b, b=b, r=r)


def joint_logdet(system: KrigingSystem, targets: Sequence[int]) -> float:
    """直接计算 ξ ∪ targets 上联合协方差的 log 行列式"""
    idx = system.indices + list(targets)
    sign, logdet = np.linalg.slogdet(cov_matrix(system.model, system.cset, idx, idx))
    return float(logdet) if sign > 0 else -np.inf


def schur_logdet(system: KrigingSystem, targets: Sequence[int]) -> float:
    """log|C_ξ| + log|Σ_SK|，与 joint_logdet 相等"""
    sign, logdet = np.linalg.slogdet(conditional_cov(system, targets))
    if sign <= 0:
        return -np.inf
    return system.logdet_c() + float(logdet)


def predict(
    system: KrigingSystem,
    targets: Sequence[int],
    observations: Sequence[float],
) -> np.ndarray:
    """
    同时预测所有目标点：Ŷ₀ = W Y_ξ

    简单克里金：Ŷ₀ = μ₀ + W(Y_ξ − μ_ξ)
    """
    y = np.asarray(observations, dtype=float).reshape(-1)
    if y.shape[0] != system.k:
        raise ValueError(f"观测长度 {y.shape[0]} 与设计点数 k={system.k} 不一致")
    w = weights(system, targets)
    if system.p == 0:
        n = system.cset.n
        mu_design = system.variant.mean_at(system.design.indices, n)
        return system.variant.mean_at(targets, n) + w @ (y - mu_design)
    return w @ y
