from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from relaxmatch.schemas.graph import Array


class SpectralDecomposition(BaseModel):
    """W = U diag(lambdas) U^T with eigenvalues ascending and v = U^T 1."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lambdas: Array
    U: Array
    v: Array
    sigma: float

    @property
    def n(self) -> int:
        return int(self.lambdas.shape[0])

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.lambdas) @ self.U.T


class Eigenspace(BaseModel):
    eigenvalue: float
    multiplicity: int
    hostile: bool
    start: int
    stop: int
    overlap: float = Field(description="norm of the projection of the all-ones vector onto the eigenspace")

    @property
    def indices(self) -> range:
        return range(self.start, self.stop)


class FriendlinessReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, ser_json_inf_nan="constants")

    n: int
    is_friendly: bool
    epsilon: float
    delta: float
    sigma: float
    m: int
    k: int
    eigenspaces: List[Eigenspace]
    per_vector_overlaps: List[float]
    gap_tol: float
    overlap_tol: float
    # basis after the in-eigenspace rotation; not serialized
    decomposition: Optional[SpectralDecomposition] = Field(default=None, exclude=True)

    def summary(self) -> str:
        status = "friendly" if self.is_friendly else f"({self.m},{self.k})-unfriendly"
        lines = [
            f"n = {self.n}: {status}",
            f"  epsilon = {self.epsilon:.6g}, delta = {self.delta:.6g}, sigma = {self.sigma:.6g}",
            f"  eigenspaces: {len(self.eigenspaces)} distinct",
        ]
        for space in self.eigenspaces:
            if space.multiplicity > 1 or space.hostile:
                tag = "hostile" if space.hostile else "degenerate"
                lines.append(
                    f"    lambda = {space.eigenvalue:.6g} (multiplicity {space.multiplicity}, {tag})"
                )
        return "\n".join(lines)
