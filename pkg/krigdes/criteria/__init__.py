"""设计准则模块"""

from krigdes.criteria.functionals import (
    CriterionKind,
    CriterionValue,
    gv_value,
    g_value,
    v_value,
    mes_value,
    gv_relative,
    criterion_of,
    evaluate_design,
    relative_efficiency,
    scale_to_unit_gv,
    cross_efficiency,
)

__all__ = [
    "CriterionKind",
    "CriterionValue",
    "gv_value",
    "g_value",
    "v_value",
    "mes_value",
    "gv_relative",
    "criterion_of",
    "evaluate_design",
    "relative_efficiency",
    "scale_to_unit_gv",
    "cross_efficiency",
]
