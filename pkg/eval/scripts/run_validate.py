"""校验主入口：运行 oracle 等价性检查并落盘报告。"""

from __future__ import annotations

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path

# 允许直接 `python eval/scripts/run_validate.py` 运行
PROJECT_ROOT = Path(__file__).resolve().parents[2]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from eval.checks.aggregate import write_validation_outputs
from eval.checks.oracles import run_validation
from eval.checks.report import render_validation_report
from krigdes.telemetry.logger import ProgressLogger


def main() -> None:
    parser = argparse.ArgumentParser(description="krigdes oracle validation runner")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--full", action="store_true", help="also run the desk study and incremental study threshold checks")
    parser.add_argument("--output-root", type=str, default=str(PROJECT_ROOT / "eval" / "runs"))
    parser.add_argument("--run-id", type=str, default=None)
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    run_id = args.run_id or datetime.utcnow().strftime("%Y%m%d_%H%M%S")
    run_dir = Path(args.output_root) / f"validate_{run_id}"
    run_dir.mkdir(parents=True, exist_ok=True)

    summary = run_validation(seed=args.seed, full=args.full, progress=ProgressLogger(run_dir / "progress.jsonl"))
    write_validation_outputs(str(run_dir), summary)
    report_path = run_dir / "validation_report.md"
    report_path.write_text(render_validation_report(summary), encoding="utf-8")

    print(f"run_id={run_id} seed={args.seed} passed={summary['passed']}")
    print(f"report={report_path}")
    sys.exit(0 if summary["passed"] else 4)


if __name__ == "__main__":
    main()
