from relaxmatch.schemas.graph import Graph, Permutation, PermutationSet
from relaxmatch.schemas.matching import AssignmentResult, MatchResult, RecoveryBound
from relaxmatch.schemas.solver import RelaxedSolution, SeedSet, SolverOptions, UniquenessCertificate
from relaxmatch.schemas.spectral import FriendlinessReport, SpectralDecomposition

__all__ = [
    "AssignmentResult",
    "FriendlinessReport",
    "Graph",
    "MatchResult",
    "Permutation",
    "PermutationSet",
    "RecoveryBound",
    "RelaxedSolution",
    "SeedSet",
    "SolverOptions",
    "SpectralDecomposition",
    "UniquenessCertificate",
]
