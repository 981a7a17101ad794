"""Distortion functionals on graph pairs.

Convention: a permutation p sends A-vertex mapping[i] to B-vertex i, so that
an exact isomorphism satisfies B = P A P^T and the distortion is ||P A - B P||_F.
"""
import numpy as np

from relaxmatch.schemas.graph import Graph, Permutation, check_same_order


def distortion(A: Graph, B: Graph, p: Permutation) -> float:
    check_same_order(A.n, B.n, p.n)
    return float(np.linalg.norm(relaxed_residual(A, B, p.matrix())))


def qap_objective(A: Graph, B: Graph, p: Permutation) -> float:
    """tr(B P A P^T)."""
    check_same_order(A.n, B.n, p.n)
    P = p.matrix()
    return float(np.trace(B.weights @ P @ A.weights @ P.T))


def apply_isomorphism(A: Graph, p: Permutation) -> Graph:
    """Forward image P A P^T, i.e. entry (i, j) is A[mapping[i], mapping[j]]."""
    check_same_order(A.n, p.n)
    index = p.array
    return Graph(weights=A.weights[np.ix_(index, index)])


def relaxed_residual(A: Graph, B: Graph, P: np.ndarray) -> np.ndarray:
    return P @ A.weights - B.weights @ P
