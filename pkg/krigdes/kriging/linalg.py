"""Cholesky 分解、jitter 兜底与对数行列式"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg as la

from krigdes.utils.errors import SingularModelError

logger = logging.getLogger(__name__)

JITTER_START = 1e-10
JITTER_STOP = 1e-6
# Σ 块的奇异判定：L 的最小对角元平方 <= SINGULAR_RTOL * scale
SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class CholFactor:
    """下三角 Cholesky 因子及实际使用的 jitter"""

    lower: np.ndarray
    jitter: float = 0.0

    @property
    def size(self) -> int:
        return int(self.lower.shape[0])

    def solve(self, b: np.ndarray) -> np.ndarray:
        """A^{-1} b"""
        return la.cho_solve((self.lower, True), b, check_finite=False)

    def half_solve(self, b: np.ndarray) -> np.ndarray:
        """L^{-1} b"""
        return la.solve_triangular(self.lower, b, lower=True, check_finite=False)

    def logdet(self) -> float:
        return float(2.0 * np.log(np.diag(self.lower)).sum())


def jitter_cholesky(a: np.ndarray, scale: float = 1.0) -> CholFactor:
    """
    带 jitter 的 Cholesky 分解

    先直接分解；失败则在对角线上加 1e-10*scale，按 x10 升级到 1e-6*scale，仍失败则抛出
    SingularModelError。

    Args:
        a: 对称矩阵
        scale: jitter 的量纲（通常为 σ²）

    Returns:
        CholFactor
    """
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return CholFactor(lower=np.zeros((0, 0)))
    try:
        return CholFactor(lower=la.cholesky(a, lower=True, check_finite=False))
    except la.LinAlgError:
        pass

    jit = JITTER_START
    eye = np.eye(a.shape[0])
    while jit <= JITTER_STOP * (1 + 1e-9):
        try:
            lower = la.cholesky(a + jit * scale * eye, lower=True, check_finite=False)
            logger.debug(f"Cholesky succeeded with jitter {jit:g}*scale")
            return CholFactor(lower=lower, jitter=jit * scale)
        except la.LinAlgError:
            jit *= 10.0
    raise SingularModelError(
        f"协方差矩阵 ({a.shape[0]}x{a.shape[0]}) 在 jitter {JITTER_STOP:g}*σ² 下仍不正定"
    )


def logdet_psd(s: np.ndarray, scale: float, rtol: float = SINGULAR_RTOL) -> Tuple[float, bool]:
    """
    半正定矩阵的对数行列式

    数值奇异（分解失败或最小主元过小）时返回 (-inf, True)，不抛异常。

    Args:
        s: 对称半正定矩阵
        scale: 判定奇异的绝对量纲（σ² + τ²）
        rtol: 相对阈值

    Returns:
        (logdet, singular)
    """
    s = np.asarray(s, dtype=float)
    if s.shape[0] == 0:
        return 0.0, False
    s = 0.5 * (s + s.T)
    try:
        lower = la.cholesky(s, lower=True, check_finite=False)
    except la.LinAlgError:
        return -np.inf, True
    diag = np.diag(lower)
    if np.min(diag) ** 2 <= rtol * scale:
        return -np.inf, True
    return float(2.0 * np.log(diag).sum()), False


def psd_factor(s: np.ndarray, scale: float, rtol: float = SINGULAR_RTOL):
    """与 logdet_psd 同样的奇异判定，返回 CholFactor 或 None"""
    s = np.asarray(s, dtype=float)
    s = 0.5 * (s + s.T)
    try:
        lower = la.cholesky(s, lower=True, check_finite=False)
    except la.LinAlgError:
        return None
    if s.shape[0] and np.min(np.diag(lower)) ** 2 <= rtol * scale:
        return None
    return CholFactor(lower=lower)
