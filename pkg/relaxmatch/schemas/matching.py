from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from relaxmatch.schemas.graph import Permutation
from relaxmatch.schemas.solver import RelaxedSolution, UniquenessCertificate

Verdict = Literal["exact_isomorphism", "within_rho", "not_isomorphic_certified", "inconclusive"]


class AssignmentResult(BaseModel):
    perm: Permutation
    objective: float
    dual_objective: float
    dual_feasible: bool


class RecoveryBound(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    rho_max: float
    components: Dict[str, float]
    normalized: bool


class PerturbationReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    lhs: float
    rhs: float
    contraction: float = Field(description="rho * ||M^-1|| * ||N||")
    precondition_met: bool
    holds: bool


class BlockNormReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    measured: float
    bound: float
    per_row: List[float]
    precondition_met: bool
    holds: bool


class MatchResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    relaxed: RelaxedSolution
    perm: Permutation
    distortion: float
    tolerance: float
    verdict: Verdict
    friendly_a: bool
    friendly_b: bool
    scale: float = 1.0
    bound: Optional[RecoveryBound] = None
    certificate: Optional[UniquenessCertificate] = None
    timings: Dict[str, float] = Field(default_factory=dict)

    def summary(self) -> Dict[str, object]:
        return {
            "verdict": self.verdict,
            "perm": list(self.perm.mapping),
            "distortion": self.distortion,
            "tolerance": self.tolerance,
            "friendly": [self.friendly_a, self.friendly_b],
            "bound": self.bound.rho_max if self.bound else None,
            "relaxed": self.relaxed.diagnostics(),
            "certificate": self.certificate.full_rank if self.certificate else None,
            "timings": self.timings,
        }
