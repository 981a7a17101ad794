"""Linear assignment by the Hungarian method with dual potentials."""
import logging
from typing import Tuple

import numpy as np

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Permutation
from relaxmatch.schemas.matching import AssignmentResult
from relaxmatch.utils.errors import DimensionMismatchError, InvalidInputError

logger = logging.getLogger(__name__)


def _validate_square(C: np.ndarray) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
        raise DimensionMismatchError(f"assignment matrix must be square and non-empty, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise InvalidInputError("assignment matrix contains non-finite entries")
    return C


def _hungarian(C: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shortest augmenting paths over 1-indexed potentials u (rows) and v (columns).

    The inner column scan is vectorized; np.argmin keeps the smallest column on ties.
    """
    n = C.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=int)  # p[j] = row assigned to column j
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = C[i0 - 1] - u[i0] - v[1:]
            improve = free & (cur < minv[1:])
            minv[1:][improve] = cur[improve]
            way[1:][improve] = j0
            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]
            tree = np.nonzero(used)[0]
            u[p[tree]] += delta
            v[tree] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    assignment = np.empty(n, dtype=int)
    assignment[p[1:] - 1] = np.arange(n)
    return assignment, u[1:], v[1:]


def _certify(C: np.ndarray, assignment: np.ndarray, u: np.ndarray, v: np.ndarray) -> Tuple[float, float, bool]:
    """Complementary slackness: u_i + v_j <= C_ij everywhere, with equality on assigned pairs."""
    n = C.shape[0]
    scale = max(1.0, float(np.max(np.abs(C))))
    slack = settings.lap_slack_rel * scale * n
    reduced = C - u[:, None] - v[None, :]
    primal = float(C[np.arange(n), assignment].sum())
    dual = float(u.sum() + v.sum())
    feasible = bool(np.all(reduced >= -slack))
    tight = bool(np.all(np.abs(reduced[np.arange(n), assignment]) <= slack))
    gap_ok = abs(primal - dual) <= 1e-9 * max(1.0, abs(primal))
    return primal, dual, feasible and tight and gap_ok


def lap_min_cost(C: np.ndarray) -> AssignmentResult:
    """Minimize sum_i C[i, perm[i]]."""
    C = _validate_square(C)
    assignment, u, v = _hungarian(C)
    primal, dual, certified = _certify(C, assignment, u, v)
    if not certified:
        logger.warning(f"assignment optimality certificate failed: primal {primal:.12g}, dual {dual:.12g}")
    return AssignmentResult(
        perm=Permutation(mapping=tuple(int(j) for j in assignment)),
        objective=primal,
        dual_objective=dual,
        dual_feasible=certified,
    )


def project_to_permutation(P: np.ndarray) -> AssignmentResult:
    """Permutation maximizing <Pi, P> = sum_i P[i, perm[i]]."""
    P = _validate_square(P)
    result = lap_min_cost(-P)
    return AssignmentResult(
        perm=result.perm,
        objective=float(P[np.arange(P.shape[0]), result.perm.array].sum()),
        dual_objective=-result.dual_objective,
        dual_feasible=result.dual_feasible,
    )
