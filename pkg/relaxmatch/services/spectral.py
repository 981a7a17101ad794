import logging
import math
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Graph
from relaxmatch.schemas.spectral import Eigenspace, FriendlinessReport, SpectralDecomposition
from relaxmatch.utils.errors import EigenConvergenceError, InvalidInputError

logger = logging.getLogger(__name__)


class FriendlinessStrength(NamedTuple):
    epsilon: float
    delta: float
    is_friendly: bool


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))


def jacobi_eigh(W: np.ndarray, max_sweeps: int, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi sweeps; returns unsorted eigenvalues and eigenvector columns."""
    a = np.array(W, dtype=float)
    n = a.shape[0]
    V = np.eye(n)
    threshold = tol * float(np.linalg.norm(W))
    off = _off_diagonal_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps == max_sweeps:
            raise EigenConvergenceError(max_sweeps, off)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = V[:, p].copy()
                vec_q = V[:, q].copy()
                V[:, p] = c * vec_p - s * vec_q
                V[:, q] = s * vec_p + c * vec_q
        sweeps += 1
        off = _off_diagonal_norm(a)
        logger.debug(f"jacobi sweep {sweeps}: off-diagonal norm {off:.3e}")
    return np.diag(a).copy(), V


def _fix_signs(U: np.ndarray, sign_tol: float) -> np.ndarray:
    """Make v_i = u_i^T 1 positive, or the largest-magnitude entry positive when v_i ~ 0."""
    U = U.copy()
    v = U.sum(axis=0)
    for i in range(U.shape[1]):
        if abs(v[i]) > sign_tol:
            flip = v[i] < 0
        else:
            flip = U[int(np.argmax(np.abs(U[:, i]))), i] < 0
        if flip:
            U[:, i] = -U[:, i]
    return U


def eig_sym(
    A: Graph,
    backend: Optional[str] = None,
    max_sweeps: Optional[int] = None,
    tol: Optional[float] = None,
) -> SpectralDecomposition:
    backend = backend or settings.eig_backend
    if backend == "jacobi":
        lambdas, V = jacobi_eigh(
            A.weights,
            settings.jacobi_max_sweeps if max_sweeps is None else max_sweeps,
            settings.jacobi_tol if tol is None else tol,
        )
    elif backend == "lapack":
        lambdas, V = np.linalg.eigh(A.weights)
    else:
        raise InvalidInputError(f"unknown eigensolver backend {backend!r}")
    order = np.argsort(lambdas, kind="stable")
    lambdas = lambdas[order]
    U = _fix_signs(V[:, order], settings.sign_tol)
    v = U.sum(axis=0)
    sigma = float(np.max(np.abs(lambdas)))
    return SpectralDecomposition(lambdas=lambdas, U=U, v=v, sigma=sigma)


def _group_eigenvalues(lambdas: np.ndarray, gap_tol: float) -> List[Tuple[int, int]]:
    groups = []
    start = 0
    for i in range(1, len(lambdas)):
        if lambdas[i] - lambdas[i - 1] > gap_tol:
            groups.append((start, i))
            start = i
    groups.append((start, len(lambdas)))
    return groups


def _balance_basis(U_E: np.ndarray) -> np.ndarray:
    """Householder reflection within the eigenspace giving every basis vector the same overlap with 1."""
    m = U_E.shape[1]
    a = U_E.sum(axis=0)
    target = np.full(m, np.linalg.norm(a) / math.sqrt(m))
    w = a - target
    ww = float(w @ w)
    if ww <= np.finfo(float).eps * float(a @ a):
        return U_E
    H = np.eye(m) - 2.0 * np.outer(w, w) / ww
    return U_E @ H


def classify(
    dec: SpectralDecomposition,
    gap_tol: Optional[float] = None,
    overlap_tol: Optional[float] = None,
) -> FriendlinessReport:
    n = dec.n
    if gap_tol is None:
        gap_tol = settings.gap_tol_rel * max(1.0, dec.sigma)
    if overlap_tol is None:
        overlap_tol = settings.overlap_tol
    if gap_tol <= 0 or overlap_tol <= 0:
        raise InvalidInputError("classification tolerances must be positive")

    U = dec.U.copy()
    eigenspaces: List[Eigenspace] = []
    for start, stop in _group_eigenvalues(dec.lambdas, gap_tol):
        multiplicity = stop - start
        overlap = float(np.linalg.norm(U[:, start:stop].sum(axis=0)))
        hostile = overlap < overlap_tol * math.sqrt(n)
        if multiplicity > 1 and not hostile:
            U[:, start:stop] = _balance_basis(U[:, start:stop])
        eigenspaces.append(
            Eigenspace(
                eigenvalue=float(np.mean(dec.lambdas[start:stop])),
                multiplicity=multiplicity,
                hostile=hostile,
                start=start,
                stop=stop,
                overlap=overlap,
            )
        )

    v = U.sum(axis=0)
    m = sum(space.multiplicity - 1 for space in eigenspaces)
    k = sum(space.multiplicity for space in eigenspaces if space.hostile)
    is_friendly = m == 0 and k == 0
    gaps = [
        float(dec.lambdas[nxt.start] - dec.lambdas[cur.stop - 1])
        for cur, nxt in zip(eigenspaces, eigenspaces[1:])
    ]
    delta = min(gaps) if gaps else math.inf
    abs_v = np.abs(v)
    epsilon = float(min(abs_v.min(), 1.0 / abs_v.max(), 1.0)) if is_friendly else 0.0

    rotated = SpectralDecomposition(lambdas=dec.lambdas, U=U, v=v, sigma=dec.sigma)
    logger.debug(f"classified n={n}: m={m}, k={k}, epsilon={epsilon:.3e}, delta={delta:.3e}")
    return FriendlinessReport(
        n=n,
        is_friendly=is_friendly,
        epsilon=epsilon,
        delta=delta,
        sigma=dec.sigma,
        m=m,
        k=k,
        eigenspaces=eigenspaces,
        per_vector_overlaps=abs_v.tolist(),
        gap_tol=gap_tol,
        overlap_tol=overlap_tol,
        decomposition=rotated,
    )


def strong_friendliness(dec: SpectralDecomposition) -> FriendlinessStrength:
    """Friendliness margins: overlaps strictly inside (epsilon, 1/epsilon) and eigenvalue gaps above delta.

    epsilon is reported as a supremum, so any value used in a bound must be strictly smaller.

    Unfriendly input gives epsilon = 0 and is_friendly = False.
    """
    report = classify(dec)
    return FriendlinessStrength(report.epsilon, report.delta, report.is_friendly)


def unfriendliness_counts(dec: SpectralDecomposition) -> Tuple[int, int]:
    report = classify(dec)
    return report.m, report.k


def analyze(
    A: Graph, gap_tol_rel: Optional[float] = None, overlap_tol: Optional[float] = None
) -> FriendlinessReport:
    """Friendliness report of A; the eigenvalue grouping tolerance is gap_tol_rel * max(1, sigma)."""
    dec = eig_sym(A)
    gap_tol = None if gap_tol_rel is None else gap_tol_rel * max(1.0, dec.sigma)
    return classify(dec, gap_tol=gap_tol, overlap_tol=overlap_tol)
