"""工具函数模块"""

from krigdes.utils.errors import (
    KrigdesError,
    ConfigError,
    CapacityError,
    CandidateParseError,
    DesignError,
    TrendError,
    CriterionMismatchError,
    NumericalError,
    SingularModelError,
    UntrackedStateError,
    ValidationFailure,
)
from krigdes.utils.helpers import (
    format_datetime,
    to_jsonable,
    write_json,
    n_choose_k,
    is_tie,
    pick_best,
)

__all__ = [
    "KrigdesError",
    "ConfigError",
    "CapacityError",
    "CandidateParseError",
    "DesignError",
    "TrendError",
    "CriterionMismatchError",
    "NumericalError",
    "SingularModelError",
    "UntrackedStateError",
    "ValidationFailure",
    "format_datetime",
    "to_jsonable",
    "write_json",
    "n_choose_k",
    "is_tie",
    "pick_best",
]
