"""Search data schemas."""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from krigdes.criteria.functionals import CriterionValue
from krigdes.design.schemas import CandidateSet, Design
from krigdes.kriging.covariance import CovModel
from krigdes.kriging.system import KrigingVariant


@dataclass(frozen=True, eq=False)
class Instance:
    """A design problem: candidate universe, covariance model and kriging variant."""

    cset: CandidateSet
    model: CovModel
    variant: KrigingVariant

    @property
    def p(self) -> int:
        return self.variant.p(self.cset.dim)

    def with_model(self, model: CovModel) -> "Instance":
        return replace(self, model=model)

    def describe(self) -> Dict[str, Any]:
        return {
            "source": self.cset.source,
            "n": self.cset.n,
            "dim": self.cset.dim,
            "model": self.model.to_dict(),
            "variant": self.variant.describe(),
        }


@dataclass
class SearchResult:
    """
    Outcome of one optimizer run.

    `criterion` is always an independent re-evaluation of `design`; `ties` holds
    the full optimal set when the optimizer enumerates (exhaustive search).
    """

    design: Design
    criterion: CriterionValue
    criterion_calls: int
    iterations: int
    elapsed: float
    seed: Optional[int] = None
    method: str = ""
    trace: List[float] = field(default_factory=list)
    ties: List[Tuple[int, ...]] = field(default_factory=list)
    restarts: List[Dict[str, Any]] = field(default_factory=list)

    def design_ids(self, cset: CandidateSet) -> List[int]:
        return [int(cset.ids[i]) for i in self.design]

    def to_dict(self, cset: Optional[CandidateSet] = None) -> Dict[str, Any]:
        out = {
            "method": self.method,
            "design": self.design.as_list(),
            "k": self.design.k,
            "criterion": self.criterion.to_dict(),
            "criterion_calls": self.criterion_calls,
            "iterations": self.iterations,
            "elapsed": self.elapsed,
            "seed": self.seed,
        }
        if cset is not None:
            out["design_ids"] = self.design_ids(cset)
        if self.trace:
            out["trace"] = self.trace
        if self.ties:
            out["ties"] = [list(t) for t in self.ties]
        if self.restarts:
            out["restarts"] = self.restarts
        return out
