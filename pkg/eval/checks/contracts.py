"""校验与研究输出的契约类型定义。"""

from typing import Any, Dict, List, Literal, Optional, TypedDict

CheckStatus = Literal["pass", "fail", "finding"]


class CheckResult(TypedDict, total=False):
    name: str
    mandatory: bool
    status: CheckStatus
    passed: bool
    instances: int
    max_error: float
    tolerance: float
    seed: int
    elapsed: float
    detail: Dict[str, Any]
    findings: List[Dict[str, Any]]


class ValidationSummary(TypedDict, total=False):
    run_id: str
    tool_version: str
    seed: int
    passed: bool
    checks: List[CheckResult]
    counters: Dict[str, int]


class StudySummary(TypedDict, total=False):
    run_id: str
    tool_version: str
    seed: int
    design_size: int
    criteria: List[str]
    average_efficiency: List[Dict[str, Any]]
    call_medians: Dict[str, float]
    flagged_combos: List[Dict[str, Any]]
    failed_combos: List[int]
    incremental: Optional[Dict[str, Any]]
    elapsed: float
