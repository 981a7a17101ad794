from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from relaxmatch.utils.errors import InvalidInputError


class ExperimentRecord(BaseModel):
    record: Literal["trial", "summary"] = "trial"
    experiment: Literal["noise_sweep", "seed_sweep"]
    trial_id: Optional[int] = None
    instance: Optional[int] = None
    n: Optional[int] = None
    l: Optional[int] = None
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    level: float = Field(description="noise multiplier or seed-count ratio")
    rho: Optional[float] = None
    q: Optional[int] = None
    mu: Optional[float] = None
    success: Optional[bool] = None
    distortion: Optional[float] = None
    conditions_ok: Optional[bool] = None
    projected_in_iso: Optional[bool] = None
    success_rate: Optional[float] = None
    min_rate: Optional[float] = None
    max_rate: Optional[float] = None
    trials: Optional[int] = None
    reason: str = ""
    runtime: Optional[float] = None


class NoiseSweepConfig(BaseModel):
    sizes: List[int] = Field(default_factory=lambda: [10, 20, 30])
    instances: int = Field(default=100, ge=1)
    repeats: int = Field(default=1, ge=1)
    multipliers: List[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
    rng_seed: int = 0

    @field_validator("sizes")
    @classmethod
    def sizes_valid(cls, value: List[int]) -> List[int]:
        if not value or min(value) < 2:
            raise InvalidInputError(f"noise sweep sizes must be non-empty and >= 2, got {value}")
        return value

    @field_validator("multipliers")
    @classmethod
    def multipliers_valid(cls, value: List[float]) -> List[float]:
        if not value or min(value) < 0:
            raise InvalidInputError(f"noise multipliers must be non-empty and >= 0, got {value}")
        return value


class SymmetricFamily(BaseModel):
    n: int = Field(ge=2)
    l: int = Field(ge=0)


class SeedSweepConfig(BaseModel):
    families: List[SymmetricFamily] = Field(
        default_factory=lambda: [
            SymmetricFamily(n=6, l=1),
            SymmetricFamily(n=6, l=2),
            SymmetricFamily(n=6, l=3),
            SymmetricFamily(n=8, l=7),
        ]
    )
    ratios: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    trials: int = Field(default=50, ge=1)
    mus: List[float] = Field(default_factory=lambda: [1.0])
    rng_seed: int = 0

    @field_validator("ratios")
    @classmethod
    def ratios_valid(cls, value: List[float]) -> List[float]:
        if not value or min(value) < 0 or max(value) > 1:
            raise InvalidInputError(f"seed ratios must lie in [0, 1], got {value}")
        return value

    @field_validator("mus")
    @classmethod
    def mus_valid(cls, value: List[float]) -> List[float]:
        if not value or min(value) <= 0:
            raise InvalidInputError(f"mu values must be positive, got {value}")
        return value
