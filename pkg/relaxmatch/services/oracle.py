"""Exhaustive ground truth: symmetry and isomorphism enumeration, minimum distortion.

All searches assign positions (B-vertices) one at a time and extend a partial
map only while the squared disagreement accumulated so far stays within budget.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Graph, Permutation, PermutationSet, check_same_order
from relaxmatch.utils.errors import DomainError, OracleLimitError

logger = logging.getLogger(__name__)


def _check_limit(n: int, oracle_limit: Optional[int]) -> None:
    limit = settings.oracle_limit if oracle_limit is None else oracle_limit
    if n > limit:
        raise OracleLimitError(n, limit)


def _tolerance(A: Graph, B: Graph) -> float:
    return settings.oracle_tol * (1.0 + A.frobenius_norm ** 2 + B.frobenius_norm ** 2)


def _row_bounds(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """bound[i, a] = ||sort(B[i]) - sort(A[a])||^2, a lower bound on the squared
    disagreement contributed by row i when position i takes A-vertex a."""
    sa = np.sort(A, axis=1)
    sb = np.sort(B, axis=1)
    return ((sb[:, None, :] - sa[None, :, :]) ** 2).sum(axis=2)


def search_order(B: np.ndarray) -> List[int]:
    """Heaviest vertex first, then greedily the vertex most connected to those already placed."""
    n = B.shape[0]
    strength = np.abs(B).sum(axis=1)
    linked = B != 0
    order: List[int] = []
    remaining = set(range(n))
    while remaining:
        if order:
            links = {i: int(linked[i, order].sum()) for i in remaining}
        else:
            links = {i: 0 for i in remaining}
        best = min(remaining, key=lambda i: (-links[i], -strength[i], i))
        order.append(best)
        remaining.remove(best)
    return order


def _enumerate(A: Graph, B: Graph, rho: float) -> List[Tuple[int, ...]]:
    a = A.weights.tolist()
    b = B.weights.tolist()
    n = A.n
    budget = rho * rho + _tolerance(A, B)
    row_bound = _row_bounds(A.weights, B.weights)
    order = search_order(B.weights)
    mapping = [-1] * n
    used = [False] * n
    found: List[Tuple[int, ...]] = []

    def extend(depth: int, acc: float) -> None:
        if depth == n:
            found.append(tuple(mapping))
            return
        i = order[depth]
        b_row = b[i]
        for value in range(n):
            if used[value] or row_bound[i, value] > budget:
                continue
            a_row = a[value]
            cost = (a_row[value] - b_row[i]) ** 2
            for j in order[:depth]:
                diff = a_row[mapping[j]] - b_row[j]
                cost += 2.0 * diff * diff
            total = acc + cost
            if total > budget:
                continue
            mapping[i] = value
            used[value] = True
            extend(depth + 1, total)
            used[value] = False
            mapping[i] = -1

    extend(0, 0.0)
    return found


def enumerate_isomorphisms(
    A: Graph, B: Graph, rho: float = 0.0, oracle_limit: Optional[int] = None
) -> PermutationSet:
    """All permutations with distortion <= rho; an empty set certifies non-isomorphism."""
    n = check_same_order(A.n, B.n)
    if rho < 0 or not math.isfinite(rho):
        raise DomainError(f"rho must be a finite non-negative number, got {rho}")
    _check_limit(n, oracle_limit)
    found = _enumerate(A, B, rho)
    logger.debug(f"oracle: {len(found)} maps with distortion <= {rho} at n={n}")
    return PermutationSet(elements=found, kind="isomorphisms")


def enumerate_symmetries(A: Graph, rho: float = 0.0, oracle_limit: Optional[int] = None) -> PermutationSet:
    isos = enumerate_isomorphisms(A, A, rho, oracle_limit)
    kind = "symmetries" if rho == 0 else "rho_symmetries"
    return PermutationSet(elements=isos.elements, kind=kind)


def brute_force_min_distortion(
    A: Graph, B: Graph, oracle_limit: Optional[int] = None
) -> Tuple[Permutation, float]:
    """Global minimizer of the distortion; ties go to the lexicographically smallest map."""
    n = check_same_order(A.n, B.n)
    _check_limit(n, oracle_limit)
    a = A.weights.tolist()
    b = B.weights.tolist()
    tol = _tolerance(A, B)
    row_bound = _row_bounds(A.weights, B.weights)
    mapping = [-1] * n
    used = [False] * n
    best: List = [math.inf, None]

    # natural position order keeps the first minimum found lexicographically smallest
    def extend(i: int, acc: float) -> None:
        if i == n:
            if acc < best[0] - tol:
                best[0] = acc
                best[1] = tuple(mapping)
            return
        b_row = b[i]
        for value in range(n):
            if used[value] or row_bound[i, value] >= best[0] - tol:
                continue
            a_row = a[value]
            cost = (a_row[value] - b_row[i]) ** 2
            for j in range(i):
                diff = a_row[mapping[j]] - b_row[j]
                cost += 2.0 * diff * diff
            total = acc + cost
            if total >= best[0] - tol:
                continue
            mapping[i] = value
            used[value] = True
            extend(i + 1, total)
            used[value] = False
            mapping[i] = -1

    extend(0, 0.0)
    perm = Permutation(mapping=best[1])
    return perm, math.sqrt(max(best[0], 0.0))
