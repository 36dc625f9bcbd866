"""Design-space data schemas."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from krigdes.utils.errors import DesignError, TrendError


class BasisKind(Enum):
    """Trend basis family."""

    CONSTANT = "constant"
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    MONOMIALS = "monomials"
    EXTERNAL_DRIFT = "external_drift"


@dataclass(eq=False)
class CandidateSet:
    """Finite candidate universe X; immutable after construction."""

    ids: np.ndarray
    coords: np.ndarray
    covariates: Dict[str, np.ndarray] = field(default_factory=dict)
    spacing: Optional[float] = None
    source: str = ""

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64).reshape(-1)
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim == 1:
            coords = coords.reshape(-1, 1)
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise DesignError("coords 必须是 (N, d) 矩阵且 d >= 1")
        if coords.shape[0] != ids.shape[0]:
            raise DesignError("ids 与 coords 行数不一致")
        if ids.shape[0] < 2:
            raise DesignError(f"候选点数 N={ids.shape[0]}，至少需要2个")
        if len(np.unique(ids)) != ids.shape[0]:
            raise DesignError("候选点 id 不唯一")
        covariates = {}
        for name, values in (self.covariates or {}).items():
            arr = np.asarray(values, dtype=float).reshape(-1)
            if arr.shape[0] != ids.shape[0]:
                raise DesignError(f"协变量 {name} 长度与候选点数不一致")
            arr.setflags(write=False)
            covariates[name] = arr
        ids.setflags(write=False)
        coords.setflags(write=False)
        self.ids = ids
        self.coords = coords
        self.covariates = covariates

    @property
    def n(self) -> int:
        return int(self.ids.shape[0])

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    @property
    def covariate_names(self) -> List[str]:
        return list(self.covariates.keys())

    def index_of(self) -> Dict[int, int]:
        """external id -> dense index"""
        return {int(cid): i for i, cid in enumerate(self.ids)}


@dataclass(frozen=True)
class Design:
    """Design ξ as a sorted tuple of dense candidate indices."""

    indices: Tuple[int, ...]

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> "Design":
        idx = [int(i) for i in indices]
        if len(set(idx)) != len(idx):
            raise DesignError(f"设计点重复: {idx}")
        bad = [i for i in idx if i < 0 or i >= n]
        if bad:
            raise DesignError(f"设计点下标越界 [0, {n}): {bad}")
        if not 1 <= len(idx) <= n - 1:
            raise DesignError(f"设计大小 k={len(idx)} 不在 [1, {n - 1}] 内")
        return cls(tuple(sorted(idx)))

    @property
    def k(self) -> int:
        return len(self.indices)

    def as_list(self) -> List[int]:
        return list(self.indices)

    def __contains__(self, item: int) -> bool:
        return int(item) in self.indices

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class TrendBasis:
    """Known regression functions f(x) = (f_1(x), ..., f_p(x))."""

    kind: BasisKind = BasisKind.CONSTANT
    monomials: Tuple[Tuple[int, ...], ...] = ()
    covariate: str = ""

    @classmethod
    def from_name(
        cls,
        name: str,
        monomials: Optional[Sequence[Sequence[int]]] = None,
        covariate: str = "",
    ) -> "TrendBasis":
        try:
            kind = BasisKind(name.lower())
        except ValueError:
            valid = ", ".join(k.value for k in BasisKind)
            raise TrendError(f"未知的趋势类型: {name}（可选: {valid}）")
        mono = tuple(tuple(int(e) for e in m) for m in (monomials or []))
        if kind is BasisKind.MONOMIALS and not mono:
            raise TrendError("monomials 趋势需要至少一个指数向量")
        if kind is BasisKind.EXTERNAL_DRIFT and not covariate:
            raise TrendError("external_drift 趋势需要指定 covariate")
        return cls(kind=kind, monomials=mono, covariate=covariate)

    def exponents(self, dim: int) -> List[Tuple[int, ...]]:
        """Monomial exponent vectors for polynomial kinds, in column order."""
        zero = tuple([0] * dim)
        unit = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
        if self.kind is BasisKind.CONSTANT:
            return [zero]
        if self.kind is BasisKind.LINEAR:
            return [zero] + unit
        if self.kind is BasisKind.QUADRATIC:
            # (1, x, y, x^2, y^2, xy) 的次序
            squares = [tuple(2 if j == i else 0 for j in range(dim)) for i in range(dim)]
            cross = [
                tuple(1 if j in (a, b) else 0 for j in range(dim))
                for a in range(dim)
                for b in range(a + 1, dim)
            ]
            return [zero] + unit + squares + cross
        if self.kind is BasisKind.MONOMIALS:
            bad = [m for m in self.monomials if len(m) != dim]
            if bad:
                raise TrendError(f"指数向量维度与坐标维度 d={dim} 不一致: {bad}")
            return list(self.monomials)
        raise TrendError("external_drift 没有多项式指数")

    def p(self, dim: int) -> int:
        if self.kind is BasisKind.EXTERNAL_DRIFT:
            return 2
        return len(self.exponents(dim))

    def describe(self) -> str:
        if self.kind is BasisKind.EXTERNAL_DRIFT:
            return f"external_drift({self.covariate})"
        if self.kind is BasisKind.MONOMIALS:
            return f"monomials{list(self.monomials)}"
        return self.kind.value
