from typing import Any, Dict, Iterable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Array
from relaxmatch.utils.errors import DimensionMismatchError, InvalidInputError

ConstraintKind = Literal["pseudo_stochastic", "doubly_stochastic", "affine_doubly"]


class RelaxedSolution(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, ser_json_inf_nan="constants")

    P: Array
    constraint_kind: ConstraintKind
    seeded: bool = False
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool = True
    unique: Optional[bool] = None
    gap: Optional[float] = None
    deficient_rows: List[int] = Field(default_factory=list)

    def diagnostics(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"P"})


class SeedSet(BaseModel):
    """Corresponding vertex functions: columns of C live on A, columns of D on B."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    C: Array
    D: Array
    mu: float = Field(default_factory=lambda: settings.mu, gt=0)

    @field_validator("C", "D", mode="before")
    @classmethod
    def as_columns(cls, value):
        matrix = np.array(value, dtype=float)
        if matrix.ndim == 1:
            matrix = matrix[:, None]
        if matrix.ndim != 2 or matrix.shape[1] == 0:
            raise InvalidInputError(f"seed matrix must be n x q with q >= 1, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise InvalidInputError("seed matrix contains non-finite entries")
        return matrix

    @model_validator(mode="after")
    def same_shape(self) -> "SeedSet":
        if self.C.shape != self.D.shape:
            raise DimensionMismatchError(f"seed matrices differ in shape: C {self.C.shape}, D {self.D.shape}")
        return self

    @property
    def q(self) -> int:
        return int(self.C.shape[1])


class RowCertificate(BaseModel):
    row: int
    min_singular: float
    deficiency: int
    hostile: bool = False


class UniquenessCertificate(BaseModel):
    full_rank: bool
    mode: Literal["unseeded", "seeded"]
    per_row: List[RowCertificate]

    @property
    def deficient_rows(self) -> List[int]:
        return [r.row for r in self.per_row if r.deficiency > 0]


class EigenspaceSeedCheck(BaseModel):
    eigenvalue: float
    multiplicity: int
    hostile: bool
    passed: bool
    violating: List[int] = Field(default_factory=list)
    residual_dim: int = 0


class SeedConditionReport(BaseModel):
    passed: bool
    eigenspaces: List[EigenspaceSeedCheck]


class SolverOptions(BaseModel):
    """Flat key-value options for one relaxed matching run."""

    model_config = ConfigDict(extra="forbid")

    constraint: Literal["pseudo", "doubly", "affine"] = "pseudo"
    mu: float = Field(default_factory=lambda: settings.mu, gt=0)
    normalize: bool = False
    certify: bool = True
    zero_cost_rel: float = Field(default_factory=lambda: settings.zero_cost_rel, gt=0)
    rank_tol: float = Field(default_factory=lambda: settings.rank_tol, gt=0)
    gap_tol_rel: float = Field(default_factory=lambda: settings.gap_tol_rel, gt=0)
    overlap_tol: float = Field(default_factory=lambda: settings.overlap_tol, gt=0)
    fw_max_iter: int = Field(default_factory=lambda: settings.fw_max_iter, ge=1)
    fw_gap_rel: float = Field(default_factory=lambda: settings.fw_gap_rel, gt=0)
    fw_away_steps: bool = Field(default_factory=lambda: settings.fw_away_steps)
    exact_tol_rel: float = Field(default_factory=lambda: settings.exact_tol_rel, gt=0)

    @classmethod
    def from_pairs(cls, pairs: Iterable[str], **overrides: Any) -> "SolverOptions":
        """Build options from `key=value` strings, e.g. from repeated --opt flags."""
        values: Dict[str, Any] = {}
        for pair in pairs:
            if "=" not in pair:
                raise InvalidInputError(f"solver option {pair!r} is not of the form key=value")
            key, raw = pair.split("=", 1)
            values[key.strip()] = raw.strip()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(values)
