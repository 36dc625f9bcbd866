"""Matérn 协方差核（geoR 参数化）、几何各向异性与协方差矩阵组装

ρ(h) = 2^{1-κ} / Γ(κ) · (h/φ)^κ · K_κ(h/φ)，ρ(0) = 1
C(x, x') = σ² ρ(d_A(x, x')) + τ² [x 与 x' 为同一候选点]
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy import special
from scipy.spatial.distance import cdist

from krigdes.design.schemas import CandidateSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CovModel:
    """Matérn 协方差模型参数"""

    sigma2: float = 1.0
    phi: float = 1.0
    kappa: float = 0.5
    nugget: float = 0.0
    aniso_angle: Optional[float] = None  # ψ_A，弧度
    aniso_ratio: Optional[float] = None  # ψ_R >= 1

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 必须 > 0，当前为 {self.sigma2}")
        if not self.phi > 0:
            raise ValueError(f"phi 必须 > 0，当前为 {self.phi}")
        if not self.kappa > 0:
            raise ValueError(f"kappa 必须 > 0，当前为 {self.kappa}")
        if not self.nugget >= 0:
            raise ValueError(f"nugget 必须 >= 0，当前为 {self.nugget}")
        if self.aniso_ratio is not None and not self.aniso_ratio >= 1:
            raise ValueError(f"aniso_ratio 必须 >= 1，当前为 {self.aniso_ratio}")

    @property
    def sill(self) -> float:
        return self.sigma2 + self.nugget

    @property
    def anisotropic(self) -> bool:
        return self.aniso_ratio is not None and self.aniso_ratio != 1.0

    def scaled(self, s: float) -> "CovModel":
        """响应乘以 s 后的模型（σ²、τ² 乘以 s²）"""
        return replace(self, sigma2=self.sigma2 * s * s, nugget=self.nugget * s * s)

    def to_dict(self):
        return {
            "sigma2": self.sigma2,
            "phi": self.phi,
            "kappa": self.kappa,
            "nugget": self.nugget,
            "aniso_angle": self.aniso_angle,
            "aniso_ratio": self.aniso_ratio,
        }


def matern_corr(h, phi: float, kappa: float):
    """
    Matérn 相关函数

    Args:
        h: 非负距离（标量或数组）
        phi: 尺度参数 φ
        kappa: 光滑参数 κ

    Returns:
        [0, 1] 内的相关系数，形状同 h
    """
    h_arr = np.asarray(h, dtype=float)
    if not (np.all(np.isfinite(h_arr)) and np.isfinite(phi) and np.isfinite(kappa)):
        raise ValueError("matern_corr 输入必须是有限值")
    if np.any(h_arr < 0):
        raise ValueError("距离 h 必须非负")

    u = h_arr / phi
    out = np.ones_like(u)
    pos = u > 0
    if np.any(pos):
        up = u[pos]
        # K_κ(u) = kve(κ, u) e^{-u}，对数域计算避免大 u 下溢、小 u 溢出
        with np.errstate(divide="ignore"):
            log_rho = (
                (1.0 - kappa) * np.log(2.0)
                - special.gammaln(kappa)
                + kappa * np.log(up)
                + np.log(special.kve(kappa, up))
                - up
            )
        out[pos] = np.exp(log_rho)
    out = np.clip(out, 0.0, 1.0)
    if np.ndim(h) == 0:
        return float(out)
    return out


def _aniso_transform(coords: np.ndarray, angle: Optional[float], ratio: Optional[float]) -> np.ndarray:
    """先旋转 -ψ_A，再把第二轴除以 ψ_R（geoR coords.aniso 约定）"""
    if ratio is None or (ratio == 1.0 and not angle):
        return coords
    if coords.shape[1] != 2:
        raise ValueError(f"各向异性只对 d=2 定义，当前 d={coords.shape[1]}")
    psi = float(angle or 0.0)
    c, s = np.cos(psi), np.sin(psi)
    x, y = coords[:, 0], coords[:, 1]
    xr = c * x + s * y
    yr = -s * x + c * y
    return np.column_stack([xr, yr / float(ratio)])


def effective_distance(
    a: Sequence[float],
    b: Sequence[float],
    angle: Optional[float] = None,
    ratio: Optional[float] = None,
) -> float:
    """各向异性变换后的欧氏距离；无各向异性时即普通欧氏距离"""
    pa = np.atleast_2d(np.asarray(a, dtype=float))
    pb = np.atleast_2d(np.asarray(b, dtype=float))
    if pa.shape[1] != pb.shape[1]:
        raise ValueError("两个点的维数不一致")
    if ratio is not None and pa.shape[1] != 2:
        raise ValueError(f"各向异性只对 d=2 定义，当前 d={pa.shape[1]}")
    ta = _aniso_transform(pa, angle, ratio)
    tb = _aniso_transform(pb, angle, ratio)
    return float(np.linalg.norm(ta[0] - tb[0]))


def cov_matrix(
    model: CovModel,
    cset: CandidateSet,
    rows: Sequence[int],
    cols: Sequence[int],
) -> np.ndarray:
    """
    候选点子集之间的协方差矩阵

    (i, j) 元为 σ² ρ(d_A) + τ² [rows[i] == cols[j]]；rows == cols 时对称半正定。
    """
    r = np.asarray(list(rows), dtype=np.int64)
    c = np.asarray(list(cols), dtype=np.int64)
    if r.size == 0 or c.size == 0:
        return np.zeros((r.size, c.size))
    pr = _aniso_transform(cset.coords[r], model.aniso_angle, model.aniso_ratio)
    pc = _aniso_transform(cset.coords[c], model.aniso_angle, model.aniso_ratio)
    h = cdist(pr, pc)
    cov = model.sigma2 * matern_corr(h, model.phi, model.kappa)
    if model.nugget > 0:
        cov = cov + model.nugget * (r[:, None] == c[None, :])
    return cov
