"""通用工具函数"""

import json
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np


def format_datetime(
    dt: Optional[datetime] = None,
    fmt: str = "%Y-%m-%d %H:%M:%S",
) -> str:
    """
    格式化日期时间

    Args:
        dt: 日期时间对象，默认为当前时间
        fmt: 格式字符串

    Returns:
        格式化后的字符串
    """
    if dt is None:
        dt = datetime.now()
    return dt.strftime(fmt)


def to_jsonable(value: Any) -> Any:
    """把 numpy 标量/数组、tuple、Path 递归转换为可 JSON 序列化的对象"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float):
        # JSON 没有 inf，保留为字符串哨兵
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    """写出 JSON 文件（UTF-8，缩进2）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(payload), f, ensure_ascii=False, indent=2)
    return path


def n_choose_k(n: int, k: int) -> int:
    """组合数，k 越界时返回 0"""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def is_tie(a: float, b: float, tol: float = 1e-9) -> bool:
    """两个准则值在相对容差内视为并列；-inf 与 -inf 相等"""
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def pick_best(
    items: Sequence[Tuple[float, Tuple[int, ...]]],
    tol: float = 1e-9,
) -> Tuple[float, Tuple[int, ...], list]:
    """
    在 (loss, design) 列表中找最小 loss 的并列集合

    Returns:
        (最优 loss, 字典序最小的最优设计, 全部并列设计)
    """
    if not items:
        raise ValueError("pick_best 需要至少一个候选")
    best_loss = min(loss for loss, _ in items)
    ties = sorted(design for loss, design in items if is_tie(loss, best_loss, tol))
    return best_loss, ties[0], ties
