"""搜索日志测试"""

import json

from krigdes.telemetry.logger import ProgressLogger, RestartLog, SearchTelemetry


def _entry(restart, loss):
    return RestartLog(
        restart=restart,
        seed=3,
        best_loss=loss,
        design=[0, 5],
        criterion_calls=10,
        iterations=2,
        elapsed=0.5,
    )


class TestProgressLogger:
    """JSONL 进度日志测试"""

    def test_append(self, tmp_path):
        """测试逐行追加"""
        logger = ProgressLogger(tmp_path / "logs" / "progress.jsonl")
        logger.log("start", {"n": 16})
        logger.log("done", {"loss": float("-inf")})
        lines = (tmp_path / "logs" / "progress.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        first = json.loads(lines[0])
        assert first["event"] == "start"
        assert first["n"] == 16
        assert json.loads(lines[1])["loss"] == "-inf"


class TestSearchTelemetry:
    """SearchTelemetry测试"""

    def test_summary(self):
        """测试运行摘要"""
        telemetry = SearchTelemetry(run_id="r1")
        telemetry.log_restart(_entry(1, 2.0))
        telemetry.log_restart(_entry(0, -1.0))
        summary = telemetry.get_run_summary()
        assert summary["total_restarts"] == 2
        assert summary["total_criterion_calls"] == 20
        assert summary["best_loss"] == -1.0
        assert telemetry.save() is None

    def test_save(self, tmp_path):
        """测试保存并按重启序号排序"""
        progress = ProgressLogger(tmp_path / "progress.jsonl")
        telemetry = SearchTelemetry(log_dir=str(tmp_path), run_id="r2", progress=progress)
        telemetry.log_restart(_entry(1, 2.0))
        telemetry.log_restart(_entry(0, 1.0))
        path = telemetry.save()
        data = json.loads(path.read_text(encoding="utf-8"))
        assert path.name == "search_r2.json"
        assert [r["restart"] for r in data["restarts"]] == [0, 1]
        assert len((tmp_path / "progress.jsonl").read_text(encoding="utf-8").splitlines()) == 2
