import logging
import math
from typing import Tuple

import numpy as np

from relaxmatch.schemas.graph import Graph
from relaxmatch.schemas.matching import BlockNormReport, PerturbationReport, RecoveryBound
from relaxmatch.schemas.spectral import FriendlinessReport
from relaxmatch.services.spectral import eig_sym
from relaxmatch.utils.errors import DimensionMismatchError, DomainError, SingularSystemError

logger = logging.getLogger(__name__)


def _check_domain(eps: float, delta: float, n: int, sigma: float = 1.0) -> None:
    if not (0 < eps <= 1):
        raise DomainError(f"epsilon must lie in (0, 1], got {eps}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")


def spectral_term(eps: float, delta: float, sigma: float, n: int) -> float:
    return delta ** 2 * eps ** 4 / (12.0 * sigma * n ** 1.5)


def lemma2_bound(eps: float, delta: float, sigma: float, n: int) -> RecoveryBound:
    """Noise level rho up to which the relaxed minimizer stays within 1/2 of the planted permutation."""
    _check_domain(eps, delta, n, sigma)
    components = {"sqrt2_sigma": math.sqrt(2.0) * sigma, "spectral_term": spectral_term(eps, delta, sigma, n)}
    return RecoveryBound(rho_max=min(components.values()), components=components, normalized=False)


def theorem3_bound(eps: float, delta: float, n: int) -> RecoveryBound:
    """Recovery bound for a graph already normalized to spectral radius 1."""
    _check_domain(eps, delta, n)
    term = spectral_term(eps, delta, 1.0, n)
    return RecoveryBound(rho_max=term, components={"spectral_term": term}, normalized=True)


def normalize_spectral_radius(A: Graph) -> Tuple[Graph, float]:
    sigma = eig_sym(A).sigma
    if sigma == 0.0:
        raise DomainError("cannot normalize the zero matrix")
    return A.scaled(1.0 / sigma), sigma


def bounds_for_report(report: FriendlinessReport) -> Tuple[RecoveryBound, RecoveryBound]:
    """Bound in the graph's own scale and the recovery bound after sigma = 1 normalization."""
    if not report.is_friendly:
        raise DomainError("recovery bounds need a friendly graph (epsilon > 0)")
    scaled = lemma2_bound(report.epsilon, report.delta, report.sigma, report.n)
    normalized = theorem3_bound(report.epsilon, report.delta / report.sigma, report.n)
    return scaled, normalized


def spectral_norm(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def _inverse_norm(M: np.ndarray) -> float:
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= np.finfo(float).eps * max(1.0, s[0]) * M.shape[0]:
        raise SingularSystemError(f"system is numerically singular (smallest singular value {s[-1]:.3e})")
    return float(1.0 / s[-1])


def perturbation_bound_check(M: np.ndarray, N: np.ndarray, rho: float, c: np.ndarray) -> PerturbationReport:
    """Compare ||u - u0|| with rho ||M^-1|| ||N|| ||u0|| / (1 - rho ||M^-1|| ||N||)
    where M u0 = c and (M + rho N) u = c."""
    M = np.asarray(M, dtype=float)
    N = np.asarray(N, dtype=float)
    c = np.asarray(c, dtype=float)
    if M.shape != N.shape or M.ndim != 2 or M.shape[0] != M.shape[1] or c.shape != (M.shape[0],):
        raise DimensionMismatchError(f"incompatible shapes M {M.shape}, N {N.shape}, c {c.shape}")
    if rho < 0:
        raise DomainError(f"rho must be non-negative, got {rho}")
    contraction = rho * _inverse_norm(M) * spectral_norm(N)
    u0 = np.linalg.solve(M, c)
    perturbed = M + rho * N
    _inverse_norm(perturbed)
    u = np.linalg.solve(perturbed, c)
    lhs = float(np.linalg.norm(u - u0))
    if contraction >= 1.0:
        logger.info(f"perturbation bound vacuous: contraction {contraction:.3e} >= 1")
        return PerturbationReport(lhs=lhs, rhs=math.inf, contraction=contraction, precondition_met=False, holds=True)
    rhs = contraction * float(np.linalg.norm(u0)) / (1.0 - contraction)
    holds = lhs <= rhs + 1e-12 * (1.0 + rhs)
    return PerturbationReport(lhs=lhs, rhs=rhs, contraction=contraction, precondition_met=True, holds=holds)


def block_matrix(v: np.ndarray, i: int) -> np.ndarray:
    """Identity with row i replaced by v^T."""
    M = np.eye(len(v))
    M[i] = v
    return M


def block_norm_bounds(v: np.ndarray, eps: float) -> BlockNormReport:
    """max_i ||M_i^-1|| against 1 + sqrt(n) / eps^2."""
    v = np.asarray(v, dtype=float)
    n = len(v)
    bound = 1.0 + math.sqrt(n) / eps ** 2 if eps > 0 else math.inf
    if eps <= 0 or np.any(np.abs(v) <= eps):
        logger.info(f"block norm precondition violated: min |v_i| = {np.min(np.abs(v)):.3e}, eps = {eps:.3e}")
        return BlockNormReport(measured=math.nan, bound=bound, per_row=[], precondition_met=False, holds=False)
    per_row = [_inverse_norm(block_matrix(v, i)) for i in range(n)]
    measured = max(per_row)
    return BlockNormReport(measured=measured, bound=bound, per_row=per_row, precondition_met=True, holds=measured < bound)
