"""设计搜索模块"""

from krigdes.search.schemas import Instance, SearchResult
from krigdes.search.objective import CriterionCounter, DesignObjective
from krigdes.search.exhaustive import enumerate_designs, exhaustive_optimal
from krigdes.search.anneal import anneal_exchange, anneal_subset, exchange_refine, steepest_swaps
from krigdes.search.increment import (
    IncrementChoice,
    select_increment,
    sequential_design,
    single_increment,
    incr_decr_optimize,
)
from krigdes.search.reduce import ReductionReport, ReductionStep, best_removal, station_reduce
from krigdes.search.study import (
    ComboResult,
    StudyReport,
    IncrementalStudyReport,
    optimize,
    run_study,
    run_incremental_study,
    study_combos,
)

__all__ = [
    "Instance",
    "SearchResult",
    "CriterionCounter",
    "DesignObjective",
    "enumerate_designs",
    "exhaustive_optimal",
    "anneal_exchange",
    "anneal_subset",
    "exchange_refine",
    "steepest_swaps",
    "IncrementChoice",
    "select_increment",
    "sequential_design",
    "single_increment",
    "incr_decr_optimize",
    "ReductionReport",
    "ReductionStep",
    "best_removal",
    "station_reduce",
    "ComboResult",
    "StudyReport",
    "IncrementalStudyReport",
    "optimize",
    "run_study",
    "run_incremental_study",
    "study_combos",
]
