"""候选集合构造、设计辅助与趋势基函数矩阵"""

import itertools
import logging
import re
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from krigdes.design.schemas import BasisKind, CandidateSet, Design, TrendBasis
from krigdes.utils.errors import CandidateParseError, CapacityError, DesignError, TrendError

logger = logging.getLogger(__name__)

DEFAULT_MAX_POINTS = 100_000

_COORD_COLUMN = re.compile(r"^(x\d+|x|y|z)$", re.IGNORECASE)
_LINE_IN_MESSAGE = re.compile(r"line (\d+)")


def make_grid(
    n_per_axis: int,
    d: int,
    spacing: float = 1.0,
    max_points: int = DEFAULT_MAX_POINTS,
) -> CandidateSet:
    """
    规则格点 {spacing*1, ..., spacing*n}^d

    id 按行主序从0开始（第一个坐标变化最慢）。

    Args:
        n_per_axis: 每个坐标轴上的点数（>= 2）
        d: 维数
        spacing: 格点间距
        max_points: N = n^d 的上限

    Returns:
        CandidateSet
    """
    if n_per_axis < 2:
        raise ValueError(f"n_per_axis 必须 >= 2，当前为 {n_per_axis}")
    if d < 1:
        raise ValueError(f"维数 d 必须 >= 1，当前为 {d}")
    if spacing <= 0:
        raise ValueError(f"spacing 必须为正数，当前为 {spacing}")
    n_total = n_per_axis ** d
    if n_total > max_points:
        raise CapacityError(f"格点数 N={n_total} 超过上限 {max_points}")

    axis = spacing * np.arange(1, n_per_axis + 1, dtype=float)
    coords = np.array(list(itertools.product(axis, repeat=d)), dtype=float)
    return CandidateSet(
        ids=np.arange(n_total),
        coords=coords,
        spacing=float(spacing),
        source=f"grid({n_per_axis}^{d}, spacing={spacing})",
    )


def load_candidates(
    path: Union[str, Path],
    coord_columns: Optional[Sequence[str]] = None,
    id_column: str = "id",
    max_points: int = DEFAULT_MAX_POINTS,
) -> CandidateSet:
    """
    读取候选点 CSV

    表头为 `id,x1[,x2,...,xd][,name1,...]`；坐标列之后的所有列都是协变量。
    坐标按平面欧氏坐标处理，不做投影换算。

    Args:
        path: CSV 文件路径
        coord_columns: 显式指定坐标列；缺省时取 id 之后连续的 x1/x2/.. 或 x/y/z 列
        id_column: id 列名
        max_points: 候选点数上限

    Returns:
        CandidateSet（保留文件中的 id）
    """
    path = Path(path)
    if not path.exists():
        raise CandidateParseError(f"候选点文件不存在: {path}")

    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.ParserError as e:
        match = _LINE_IN_MESSAGE.search(str(e))
        line = int(match.group(1)) if match else None
        raise CandidateParseError("inconsistent column count", line=line) from e

    header = [c.strip() for c in raw.columns]
    raw.columns = header
    if not header or header[0] != id_column:
        raise CandidateParseError(f"表头第一列必须是 '{id_column}'，实际为 {header[:1]}", line=1)

    if coord_columns:
        coord_cols = list(coord_columns)
        missing = [c for c in coord_cols if c not in header]
        if missing:
            raise CandidateParseError(f"缺少坐标列 {missing}", line=1)
    else:
        coord_cols = []
        for name in header[1:]:
            if not _COORD_COLUMN.match(name):
                break
            coord_cols.append(name)
    if not coord_cols:
        raise CandidateParseError("未找到坐标列（期望 x1,x2,... 或 x,y）", line=1)
    covariate_cols = [c for c in header[1:] if c not in coord_cols]

    # 字段数不足时 pandas 用 NaN 补齐
    short_rows = raw.isna().any(axis=1).to_numpy()
    if short_rows.any():
        raise CandidateParseError("inconsistent column count", line=int(np.argmax(short_rows)) + 2)

    if len(raw) > max_points:
        raise CapacityError(f"候选点数 N={len(raw)} 超过上限 {max_points}")

    ids = pd.to_numeric(raw[id_column], errors="coerce")
    bad = ids.isna().to_numpy() | (ids.fillna(0) % 1 != 0).to_numpy()
    if bad.any():
        raise CandidateParseError("non-integer id", line=int(np.argmax(bad)) + 2)
    dup = ids.duplicated().to_numpy()
    if dup.any():
        raise CandidateParseError("duplicate id", line=int(np.argmax(dup)) + 2)

    numeric = {}
    for col in coord_cols + covariate_cols:
        values = pd.to_numeric(raw[col].str.strip(), errors="coerce")
        bad = values.isna().to_numpy()
        if bad.any():
            kind = "coordinate" if col in coord_cols else "covariate"
            raise CandidateParseError(
                f"non-numeric {kind} in column '{col}'", line=int(np.argmax(bad)) + 2
            )
        numeric[col] = values.to_numpy(dtype=float)

    coords = np.column_stack([numeric[c] for c in coord_cols])
    covariates = {c: numeric[c] for c in covariate_cols}
    logger.info(
        f"Loaded {len(raw)} candidates from {path} (d={len(coord_cols)}, covariates={covariate_cols})"
    )
    return CandidateSet(
        ids=ids.to_numpy(dtype=np.int64),
        coords=coords,
        covariates=covariates,
        source=str(path),
    )


def basis_matrix(basis: TrendBasis, cset: CandidateSet, subset: Sequence[int]) -> np.ndarray:
    """
    趋势设计矩阵 F（|subset| x p），第 i 行为 f(x_{subset[i]})

    external_drift 返回 (1, covariate) 两列。
    """
    idx = np.asarray(list(subset), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= cset.n):
        raise DesignError(f"下标越界 [0, {cset.n})")

    if basis.kind is BasisKind.EXTERNAL_DRIFT:
        if basis.covariate not in cset.covariates:
            raise TrendError(
                f"外部漂移协变量 '{basis.covariate}' 不存在，可用: {cset.covariate_names}"
            )
        drift = cset.covariates[basis.covariate][idx]
        return np.column_stack([np.ones(idx.size), drift])

    pts = cset.coords[idx]
    exps = np.asarray(basis.exponents(cset.dim), dtype=float)  # p x d
    # 逐列 prod_j x_j^{e_j}；0^0 = 1
    return np.prod(pts[:, None, :] ** exps[None, :, :], axis=2).reshape(idx.size, exps.shape[0])


def complement(design: Union[Design, Iterable[int]], n: int) -> List[int]:
    """非设计点 ξ0 = X \\ ξ，升序"""
    chosen = np.asarray(list(design), dtype=np.int64)
    return np.setdiff1d(np.arange(n), chosen, assume_unique=False).tolist()


def ids_to_indices(cset: CandidateSet, ids: Iterable[int]) -> List[int]:
    """外部 id 转为内部稠密下标"""
    lookup = cset.index_of()
    out = []
    for cid in ids:
        if int(cid) not in lookup:
            raise DesignError(f"未知的候选点 id: {cid}")
        out.append(lookup[int(cid)])
    return out


def plausible_start(cset: CandidateSet, k: int) -> Design:
    """
    “合理”的起始设计：包围盒角点，其次是相对边的中点，再按最大最小距离补足

    k=6 时为 4 个角点 + 左右两条边的中点。
    """
    if not 1 <= k <= cset.n - 1:
        raise DesignError(f"k={k} 不在 [1, {cset.n - 1}] 内")
    lo = cset.coords.min(axis=0)
    hi = cset.coords.max(axis=0)
    mid = 0.5 * (lo + hi)
    d = cset.dim

    anchors = [np.array(c) for c in itertools.product(*zip(lo, hi))]
    for axis in range(d):
        for end in (lo[axis], hi[axis]):
            face = mid.copy()
            face[axis] = end
            anchors.append(face)

    chosen: List[int] = []
    for anchor in anchors:
        if len(chosen) >= k:
            break
        dist = np.linalg.norm(cset.coords - anchor, axis=1)
        dist[chosen] = np.inf
        best = int(np.argmin(dist))
        if best not in chosen:
            chosen.append(best)

    while len(chosen) < k:
        dist = cdist(cset.coords, cset.coords[chosen]).min(axis=1)
        dist[chosen] = -np.inf
        chosen.append(int(np.argmax(dist)))
    return Design.of(chosen, cset.n)


def neighbor_table(
    cset: CandidateSet,
    radius: Optional[float] = 2.0,
    nearest: int = 8,
) -> List[np.ndarray]:
    """
    每个候选点的邻域

    格点（有 spacing）取 radius 个格距以内的点；不规则集合取最近的 nearest 个点。
    """
    dist = cdist(cset.coords, cset.coords)
    np.fill_diagonal(dist, np.inf)
    table = []
    if cset.spacing is not None and radius is not None:
        limit = radius * cset.spacing + 1e-9
        for i in range(cset.n):
            table.append(np.flatnonzero(dist[i] <= limit))
    else:
        r = min(nearest, cset.n - 1)
        for i in range(cset.n):
            table.append(np.sort(np.argsort(dist[i], kind="stable")[:r]))
    return table
