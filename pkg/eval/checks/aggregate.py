"""校验与研究结果的汇总与落盘。"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from eval.checks.contracts import StudySummary, ValidationSummary
from krigdes import __version__
from krigdes.search.study import IncrementalStudyReport, StudyReport
from krigdes.utils.helpers import format_datetime, to_jsonable, write_json


def aggregate_study(
    report: StudyReport,
    seed: int,
    incremental: Optional[IncrementalStudyReport] = None,
) -> StudySummary:
    data = report.to_dict()
    return {
        "run_id": format_datetime(fmt="%Y%m%d_%H%M%S"),
        "tool_version": __version__,
        "seed": seed,
        "design_size": data["design_size"],
        "criteria": data["criteria"],
        "average_efficiency": data["average_efficiency"],
        "call_medians": data["call_medians"],
        "flagged_combos": data["flagged_combos"],
        "failed_combos": data["failed_combos"],
        "incremental": incremental.to_dict() if incremental is not None else None,
        "elapsed": data["elapsed"],
    }


def write_study_outputs(
    output_dir: str,
    report: StudyReport,
    summary: StudySummary,
    config: Dict[str, Any],
    incremental: Optional[IncrementalStudyReport] = None,
) -> Dict[str, Path]:
    """
    研究结果目录：

    - study_summary.json：汇总、完整配置
    - study_combos.json：每个组合的设计、准则值、调用次数
    - efficiency_long.csv / efficiency_table.csv：交叉效率长表与平均表
    - incremental.csv：单次增量设计效率（若运行）
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "summary": write_json(out / "study_summary.json", {**summary, "config": config}),
        "combos": write_json(out / "study_combos.json", {"combos": report.to_dict()["combos"]}),
    }

    long_path = out / "efficiency_long.csv"
    report.efficiency_frame().to_csv(long_path, index=False)
    paths["efficiency_long"] = long_path

    table_path = out / "efficiency_table.csv"
    report.average_table().to_csv(table_path, index=False)
    paths["efficiency_table"] = table_path

    if incremental is not None:
        inc_path = out / "incremental.csv"
        frame = incremental.frame()
        for col in ("start", "increment", "optimum"):
            if col in frame:
                frame[col] = frame[col].map(lambda v: " ".join(str(i) for i in v))
        frame.to_csv(inc_path, index=False)
        paths["incremental"] = inc_path
    return paths


def write_validation_outputs(output_dir: str, summary: ValidationSummary) -> Dict[str, Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_path = write_json(out / "validation_summary.json", dict(summary))

    rows = [
        {
            "name": c["name"],
            "mandatory": c["mandatory"],
            "status": c["status"],
            "instances": c.get("instances"),
            "max_error": c.get("max_error"),
            "tolerance": c.get("tolerance"),
            "elapsed": c.get("elapsed"),
        }
        for c in summary["checks"]
    ]
    table_path = out / "validation_checks.csv"
    pd.DataFrame(to_jsonable(rows)).to_csv(table_path, index=False)
    return {"summary": summary_path, "checks": table_path}
