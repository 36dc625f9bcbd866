"""研究主入口：(κ, φ) 参数研究 + 单次增量设计效率，落盘表格与报告。"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path

# 允许直接 `python eval/scripts/run_study.py` 运行
PROJECT_ROOT = Path(__file__).resolve().parents[2]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from apps.cli.commands import build_instance
from eval.checks.aggregate import aggregate_study, write_study_outputs
from eval.checks.oracles import judge_incremental_efficiency, judge_study_efficiencies
from eval.checks.report import render_study_report
from krigdes.config.settings import Settings
from krigdes.search.study import run_incremental_study, run_study
from krigdes.telemetry.logger import ProgressLogger
from krigdes.utils.helpers import write_json


def main() -> None:
    parser = argparse.ArgumentParser(description="krigdes parameter study runner")
    parser.add_argument("--config", type=str, default=str(PROJECT_ROOT / "configs" / "study_linear_desk.json"))
    parser.add_argument("--output-root", type=str, default=str(PROJECT_ROOT / "eval" / "runs"))
    parser.add_argument("--run-id", type=str, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--skip-incremental", action="store_true")
    parser.add_argument(
        "--check",
        action="store_true",
        help="check efficiency thresholds (xi_GV >= 0.85, incremental mean >= 0.97, median 1 +- 0.005); exit 4 on failure",
    )
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    run_id = args.run_id or datetime.utcnow().strftime("%Y%m%d_%H%M%S")
    run_dir = Path(args.output_root) / f"study_{run_id}"
    run_dir.mkdir(parents=True, exist_ok=True)

    settings = Settings.from_file(args.config)
    settings.task.name = "study"
    if args.workers is not None:
        settings.search.workers = args.workers
    settings.validate()

    instance = build_instance(settings)
    progress = ProgressLogger(run_dir / "progress.jsonl")
    report = run_study(instance, settings.study, settings.search, method=settings.task.method, progress=progress)
    incremental = None
    if not args.skip_incremental and settings.study.incremental_l > 0:
        incremental = run_incremental_study(instance, settings.study, settings.search)

    summary = aggregate_study(report, settings.search.seed, incremental)
    write_study_outputs(str(run_dir), report, summary, settings.to_dict(), incremental)
    report_path = run_dir / "study_report.md"
    report_path.write_text(render_study_report(summary), encoding="utf-8")
    print(f"run_id={run_id} combos={len(report.combos)} failed={len(summary['failed_combos'])}")
    print(f"report={report_path}")

    if args.check:
        checks = [judge_study_efficiencies(report)]
        if incremental is not None:
            checks.append(judge_incremental_efficiency(incremental))
        write_json(run_dir / "threshold_checks.json", {"checks": checks})
        for check in checks:
            print(f"{check['name']}: {check['status']}")
        sys.exit(0 if all(c["passed"] for c in checks) else 4)


if __name__ == "__main__":
    main()
