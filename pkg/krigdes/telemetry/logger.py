"""搜索过程的可观测日志"""

import json
import logging
import os
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from threading import Lock
from typing import Any, Dict, List, Optional

from krigdes.utils.helpers import to_jsonable

logger = logging.getLogger(__name__)


class ProgressLogger:
    """线程安全进度日志（JSONL）"""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = Lock()

    def log(self, event: str, payload: Dict[str, Any]) -> None:
        row = {
            "ts": datetime.utcnow().isoformat() + "Z",
            "event": event,
            **to_jsonable(payload),
        }
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(row, ensure_ascii=False) + "\n")


@dataclass
class RestartLog:
    """单次重启的记录"""
    restart: int
    seed: int
    best_loss: float
    design: List[int]
    criterion_calls: int
    iterations: int
    elapsed: float
    accepted_moves: int = 0
    temperature_levels: int = 0


class SearchTelemetry:
    """
    搜索可观测记录器

    记录每次重启的：
    - 派生种子
    - 最优损失与设计
    - 准则调用次数与迭代次数
    - 耗时
    """

    def __init__(
        self,
        log_dir: Optional[str] = None,
        run_id: Optional[str] = None,
        progress: Optional[ProgressLogger] = None,
    ):
        """
        初始化记录器

        Args:
            log_dir: 日志目录；为 None 时只在内存中记录
            run_id: 运行ID
            progress: 可选的 JSONL 进度日志
        """
        self.log_dir = log_dir
        if log_dir is not None:
            os.makedirs(log_dir, exist_ok=True)
        self.run_id = run_id or datetime.now().strftime("%Y%m%d_%H%M%S")
        self.progress = progress
        self.restarts: List[RestartLog] = []
        self._lock = Lock()

    def log_restart(self, entry: RestartLog) -> None:
        """记录一次重启（并发重启时可从多个线程调用）"""
        with self._lock:
            self.restarts.append(entry)
        if self.progress is not None:
            self.progress.log("restart_done", asdict(entry))

    def save(self) -> Optional[Path]:
        """保存日志到文件"""
        if self.log_dir is None:
            return None
        log_file = Path(self.log_dir) / f"search_{self.run_id}.json"
        data = {
            "run_id": self.run_id,
            "restarts": [asdict(r) for r in sorted(self.restarts, key=lambda r: r.restart)],
            "summary": self.get_run_summary(),
        }
        with open(log_file, "w", encoding="utf-8") as f:
            json.dump(to_jsonable(data), f, ensure_ascii=False, indent=2)
        return log_file

    def get_run_summary(self) -> Dict[str, Any]:
        """获取运行摘要"""
        total_calls = sum(r.criterion_calls for r in self.restarts)
        avg_elapsed = (
            sum(r.elapsed for r in self.restarts) / len(self.restarts)
            if self.restarts else 0
        )
        best = min(self.restarts, key=lambda r: (r.best_loss, r.design), default=None)
        return {
            "run_id": self.run_id,
            "total_restarts": len(self.restarts),
            "total_criterion_calls": total_calls,
            "average_elapsed": avg_elapsed,
            "best_loss": best.best_loss if best else None,
        }
