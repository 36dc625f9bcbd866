"""校验与研究报告渲染。"""

from __future__ import annotations

from typing import Any

from eval.checks.contracts import StudySummary, ValidationSummary


def render_validation_report(summary: ValidationSummary) -> str:
    lines = []
    lines.append("# krigdes Validation Report")
    lines.append("")
    lines.append(f"- run_id: `{summary.get('run_id', '')}`")
    lines.append(f"- version: `{summary.get('tool_version', '')}`")
    lines.append(f"- seed: `{summary.get('seed', '')}`")
    lines.append(f"- result: **{'PASS' if summary.get('passed') else 'FAIL'}**")
    counters = summary.get("counters", {})
    lines.append(
        f"- counters: total={counters.get('total', 0)}, "
        f"failed={counters.get('failed', 0)}, "
        f"findings={counters.get('findings', 0)}"
    )
    lines.append("")
    lines.append("| check | mandatory | status | instances | max error | tolerance | seconds |")
    lines.append("|---|---|---|---|---|---|---|")
    for c in summary.get("checks", []):
        lines.append(
            f"| {c['name']} | {'yes' if c['mandatory'] else 'no'} | {c['status']} | "
            f"{c.get('instances', '')} | {_fmt(c.get('max_error', ''))} | "
            f"{_fmt(c.get('tolerance', ''))} | {_fmt(c.get('elapsed', ''))} |"
        )

    for c in summary.get("checks", []):
        if not c.get("findings"):
            continue
        lines.append("")
        lines.append(f"## {c['name']} findings")
        for finding in c["findings"]:
            lines.append(f"- `{finding}`")
    lines.append("")
    return "\n".join(lines)


def render_study_report(summary: StudySummary) -> str:
    lines = []
    lines.append("# krigdes Study Report")
    lines.append("")
    lines.append(f"- run_id: `{summary.get('run_id', '')}`")
    lines.append(f"- design size: `{summary.get('design_size', '')}`")
    lines.append(f"- criteria: `{', '.join(summary.get('criteria', []))}`")
    lines.append(f"- failed combos: `{summary.get('failed_combos', [])}`")
    lines.append("")

    table = summary.get("average_efficiency", [])
    if table:
        columns = [k for k in table[0] if k != "design"]
        lines.append("## Average relative efficiencies")
        lines.append("")
        lines.append("| design | " + " | ".join(columns) + " |")
        lines.append("|---" * (len(columns) + 1) + "|")
        for row in table:
            lines.append(f"| {row['design']} | " + " | ".join(_fmt(row[c]) for c in columns) + " |")
        lines.append("")

    lines.append("## Median criterion calls")
    lines.append("")
    for name, median in summary.get("call_medians", {}).items():
        lines.append(f"- {name}: `{median:.0f}`")
    flagged = summary.get("flagged_combos", [])
    if flagged:
        lines.append("")
        lines.append("### High call-count combos")
        for f in flagged:
            lines.append(
                f"- kappa={f['kappa']}, phi={f['phi']} ({f['criterion']}): "
                f"{f['criterion_calls']} calls vs median {f['median']:.0f}"
            )

    incremental = summary.get("incremental")
    if incremental:
        lines.append("")
        lines.append("## Single-increment designs")
        lines.append("")
        lines.append(f"- start: `{incremental['start']}` (k={incremental['k_start']}), l=`{incremental['l']}`")
        lines.append(f"- mean GV efficiency: `{_fmt(incremental['mean_efficiency'])}`")
        lines.append(f"- median GV efficiency: `{_fmt(incremental['median_efficiency'])}`")
    lines.append("")
    return "\n".join(lines)


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        if v != 0 and abs(v) < 1e-3:
            return f"{v:.3e}"
        return f"{v:.6f}"
    return str(v)
