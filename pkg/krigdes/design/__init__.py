"""设计空间模块"""

from krigdes.design.schemas import BasisKind, CandidateSet, Design, TrendBasis
from krigdes.design.space import (
    make_grid,
    load_candidates,
    basis_matrix,
    complement,
    ids_to_indices,
    plausible_start,
    neighbor_table,
)

__all__ = [
    "BasisKind",
    "CandidateSet",
    "Design",
    "TrendBasis",
    "make_grid",
    "load_candidates",
    "basis_matrix",
    "complement",
    "ids_to_indices",
    "plausible_start",
    "neighbor_table",
]
