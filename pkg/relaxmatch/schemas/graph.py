from typing import Annotated, Any, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, PlainSerializer, field_validator

from relaxmatch.utils.errors import (
    AsymmetricInputError,
    DimensionMismatchError,
    InvalidInputError,
)

SYMMETRY_TOL = 1e-12

# dense arrays serialize as nested lists
Array = Annotated[np.ndarray, PlainSerializer(lambda a: a.tolist(), return_type=list)]


class Graph(BaseModel):
    """Undirected weighted graph stored as a dense symmetric matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: Array
    name: Optional[str] = None

    @field_validator("weights", mode="before")
    @classmethod
    def validate_weights(cls, value):
        try:
            matrix = np.array(value, dtype=float)
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"weights are not a numeric matrix: {e}")
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise DimensionMismatchError(f"weights must be a non-empty square matrix, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise InvalidInputError("weights contain non-finite entries")
        asymmetry = float(np.max(np.abs(matrix - matrix.T)))
        if asymmetry > SYMMETRY_TOL:
            raise AsymmetricInputError(
                f"weights are not symmetric: max |W - W^T| = {asymmetry:.3e} exceeds {SYMMETRY_TOL:.0e}"
            )
        if asymmetry > 0.0:
            # within tolerance: store the exactly symmetric part
            matrix = (matrix + matrix.T) / 2.0
        matrix.setflags(write=False)
        return matrix

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.weights))

    def scaled(self, factor: float) -> "Graph":
        return Graph(weights=self.weights * factor, name=self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.weights.shape == other.weights.shape and bool(np.array_equal(self.weights, other.weights))

    __hash__ = None  # type: ignore[assignment]


class Permutation(BaseModel):
    """Bijection on {0..n-1}; row i of its matrix has its one in column mapping[i]."""

    model_config = ConfigDict(frozen=True)

    mapping: Tuple[int, ...]

    @field_validator("mapping", mode="before")
    @classmethod
    def validate_mapping(cls, value):
        try:
            mapping = tuple(int(x) for x in value)
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"permutation entries must be integers: {e}")
        n = len(mapping)
        if n == 0:
            raise InvalidInputError("permutation must be non-empty")
        if sorted(mapping) != list(range(n)):
            raise InvalidInputError(f"mapping {list(mapping)} is not a bijection of 0..{n - 1}")
        return mapping

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(mapping=tuple(range(n)))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Permutation":
        matrix = np.asarray(matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"permutation matrix must be square, got {matrix.shape}")
        if not (np.all((matrix == 0) | (matrix == 1)) and np.all(matrix.sum(axis=0) == 1)
                and np.all(matrix.sum(axis=1) == 1)):
            raise InvalidInputError("matrix is not a 0/1 permutation matrix")
        return cls(mapping=tuple(int(j) for j in np.argmax(matrix, axis=1)))

    @property
    def n(self) -> int:
        return len(self.mapping)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.mapping, dtype=int)

    def matrix(self) -> np.ndarray:
        result = np.zeros((self.n, self.n))
        result[np.arange(self.n), self.array] = 1.0
        return result

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, image in enumerate(self.mapping):
            inv[image] = i
        return Permutation(mapping=tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Matrix product self.matrix() @ other.matrix()."""
        if other.n != self.n:
            raise DimensionMismatchError(f"cannot compose permutations of sizes {self.n} and {other.n}")
        return Permutation(mapping=tuple(other.mapping[image] for image in self.mapping))

    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.mapping))

    def __lt__(self, other: "Permutation") -> bool:
        return self.mapping < other.mapping


SetKind = Literal["symmetries", "isomorphisms", "rho_symmetries"]


class PermutationSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    elements: Tuple[Permutation, ...]
    kind: SetKind

    @field_validator("elements", mode="before")
    @classmethod
    def sort_elements(cls, value):
        unique = {p.mapping: p for p in (_coerce_permutation(v) for v in value)}
        return tuple(unique[key] for key in sorted(unique))

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Permutation) -> bool:
        return any(p.mapping == q.mapping for q in self.elements)

    def non_trivial(self) -> List[Permutation]:
        return [p for p in self.elements if not p.is_identity()]

    def is_group(self) -> bool:
        """Exhaustive check for identity, closure under composition and inverses."""
        if not self.elements:
            return False
        members = {p.mapping for p in self.elements}
        n = self.elements[0].n
        if tuple(range(n)) not in members:
            return False
        for p in self.elements:
            if p.inverse().mapping not in members:
                return False
            for q in self.elements:
                if p.compose(q).mapping not in members:
                    return False
        return True

    def coset(self, p: Permutation, kind: SetKind = "isomorphisms") -> "PermutationSet":
        """{p * s : s in self}; for a symmetry group of A this is Iso(A -> pAp^T)."""
        return PermutationSet(elements=[p.compose(s) for s in self.elements], kind=kind)

    def conjugate(self, p: Permutation) -> "PermutationSet":
        """{p * s * p^-1 : s in self}; maps Sym A onto Sym(pAp^T)."""
        p_inv = p.inverse()
        return PermutationSet(elements=[p.compose(s).compose(p_inv) for s in self.elements], kind=self.kind)


def check_same_order(*sizes: int) -> int:
    if len(set(sizes)) != 1:
        raise DimensionMismatchError(f"dimension mismatch: sizes {list(sizes)}")
    return sizes[0]


def _coerce_permutation(value: Any) -> Permutation:
    if isinstance(value, Permutation):
        return value
    if isinstance(value, dict):
        return Permutation.model_validate(value)
    return Permutation(mapping=tuple(value))
