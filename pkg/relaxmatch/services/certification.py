"""Uniqueness certificates and seed checks for the pseudo-stochastic relaxations.

Everything is expressed in the (rotated) eigenbasis of B, where row i of the
first-order conditions couples F[i, :] with the multiplier of (P 1)_i only.
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Graph, Permutation, PermutationSet
from relaxmatch.schemas.solver import (
    EigenspaceSeedCheck,
    RowCertificate,
    SeedConditionReport,
    SeedSet,
    UniquenessCertificate,
)
from relaxmatch.schemas.spectral import FriendlinessReport
from relaxmatch.services.spectral import analyze
from relaxmatch.utils.errors import DimensionMismatchError, InvalidInputError, SeedGenerationError

logger = logging.getLogger(__name__)


def _hostile_rows(report: FriendlinessReport) -> set:
    return {i for space in report.eigenspaces if space.hostile for i in space.indices}


def row_system(
    lambdas: np.ndarray, v: np.ndarray, G: np.ndarray, mu: float, i: int, hostile: bool
) -> np.ndarray:
    """Homogeneous first-order system of row i.

    Non-hostile rows eliminate the multiplier through v_i:
        M_i = diag(c_i) + mu (I - v e_i^T / v_i) G + e_i v^T.
    Hostile rows (v_i = 0) keep it as an unknown in the bordered form
        [[diag(c_i) + mu G, v], [v^T, 0]].
    """
    n = len(lambdas)
    c = (lambdas[i] - lambdas) ** 2
    if hostile:
        M = np.zeros((n + 1, n + 1))
        M[:n, :n] = np.diag(c) + mu * G
        M[:n, n] = v
        M[n, :n] = v
        return M
    e_i = np.zeros(n)
    e_i[i] = 1.0
    return np.diag(c) + mu * (np.eye(n) - np.outer(v, e_i) / v[i]) @ G + np.outer(e_i, v)


def certify_uniqueness(
    B: Graph,
    seeds: Optional[SeedSet] = None,
    rank_tol: Optional[float] = None,
    gap_tol_rel: Optional[float] = None,
    overlap_tol: Optional[float] = None,
) -> UniquenessCertificate:
    rank_tol = settings.rank_tol if rank_tol is None else rank_tol
    report = analyze(B, gap_tol_rel, overlap_tol)
    dec = report.decomposition
    n = B.n
    if seeds is not None:
        if seeds.D.shape[0] != n:
            raise DimensionMismatchError(f"seed matrix has {seeds.D.shape[0]} rows, graph has {n} vertices")
        projected = dec.U.T @ seeds.D
        G = projected @ projected.T
        mu = seeds.mu
    else:
        G = np.zeros((n, n))
        mu = 0.0
    hostile_rows = _hostile_rows(report)

    per_row: List[RowCertificate] = []
    for i in range(n):
        hostile = i in hostile_rows
        M = row_system(dec.lambdas, dec.v, G, mu, i, hostile)
        s = np.linalg.svd(M, compute_uv=False)
        rank = int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0
        per_row.append(
            RowCertificate(row=i, min_singular=float(s[-1]), deficiency=M.shape[0] - rank, hostile=hostile)
        )
    full_rank = all(r.deficiency == 0 for r in per_row)
    mode = "seeded" if seeds is not None else "unseeded"
    logger.info(f"{mode} certificate for n={n}: full_rank={full_rank}")
    return UniquenessCertificate(full_rank=full_rank, mode=mode, per_row=per_row)


def _residual_dimension(U_E: np.ndarray, D: np.ndarray, rank_tol: float) -> int:
    """dim(E ∩ 1-perp ∩ ker D^T), the freedom left to the seeded relaxation on E."""
    constraints = np.vstack([U_E.sum(axis=0)[None, :], D.T @ U_E])
    s = np.linalg.svd(constraints, compute_uv=False)
    rank = int(np.sum(s > rank_tol * max(1.0, s[0] if len(s) else 0.0)))
    return U_E.shape[1] - rank


def check_seed_conditions(B: Graph, D: np.ndarray) -> SeedConditionReport:
    """Evaluate the seed conditions on every degenerate or hostile eigenspace of B.

    Non-hostile space: (1^T u_i) D D^T u_j != (u_i^T D D^T u_j) 1 for all i, j in the space.
    Hostile space: D D^T u_j != 0 for all j in the space.
    A space passes when no j violates and no residual freedom remains.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim == 1:
        D = D[:, None]
    if D.shape[0] != B.n:
        raise DimensionMismatchError(f"seed matrix has {D.shape[0]} rows, graph has {B.n} vertices")
    report = analyze(B)
    U = report.decomposition.U
    n = B.n
    DD = D @ D.T
    tol = settings.overlap_tol * math.sqrt(n) * (1.0 + float(np.linalg.norm(D)) ** 2)
    ones = np.ones(n)

    checks: List[EigenspaceSeedCheck] = []
    for space in report.eigenspaces:
        if space.multiplicity == 1 and not space.hostile:
            continue
        idx = list(space.indices)
        violating = []
        for j in idx:
            seen = DD @ U[:, j]
            if space.hostile:
                ok = np.linalg.norm(seen) > tol
            else:
                ok = all(
                    np.linalg.norm(U[:, i].sum() * seen - (U[:, i] @ seen) * ones) > tol for i in idx
                )
            if not ok:
                violating.append(j)
        residual = _residual_dimension(U[:, idx], D, settings.rank_tol)
        checks.append(
            EigenspaceSeedCheck(
                eigenvalue=space.eigenvalue,
                multiplicity=space.multiplicity,
                hostile=space.hostile,
                passed=not violating and residual == 0,
                violating=violating,
                residual_dim=residual,
            )
        )
    return SeedConditionReport(passed=all(c.passed for c in checks), eigenspaces=checks)


def indicator_seeds(n: int, vertices: Sequence[int]) -> np.ndarray:
    if len(set(vertices)) != len(vertices) or any(not 0 <= x < n for x in vertices):
        raise InvalidInputError(f"seed vertices {list(vertices)} must be distinct indices in 0..{n - 1}")
    D = np.zeros((n, len(vertices)))
    D[list(vertices), np.arange(len(vertices))] = 1.0
    return D


def find_invariant_symmetry(D: np.ndarray, sym: PermutationSet) -> Optional[Permutation]:
    """First non-trivial symmetry p with P D = D, if any."""
    for p in sym.non_trivial():
        if np.array_equal(D[p.array], D):
            return p
    return None


def generate_seeds(
    B: Graph,
    sym: PermutationSet,
    q: int,
    rng_seed=None,
    required: Optional[int] = None,
    retry_cap: Optional[int] = None,
) -> np.ndarray:
    """q random indicator columns not invariant under `required` non-trivial symmetries (default: all)."""
    n = B.n
    if not 1 <= q <= n:
        raise InvalidInputError(f"seed count q={q} must lie in 1..{n}")
    rng = np.random.default_rng(rng_seed)
    retry_cap = settings.seed_retry_cap if retry_cap is None else retry_cap
    non_trivial = sym.non_trivial()
    needed = len(non_trivial) if required is None else min(required, len(non_trivial))

    invariant: List[Permutation] = []
    for attempt in range(retry_cap):
        D = indicator_seeds(n, [int(x) for x in rng.choice(n, size=q, replace=False)])
        invariant = [p for p in non_trivial if np.array_equal(D[p.array], D)]
        if len(non_trivial) - len(invariant) >= needed:
            logger.debug(f"seeds found after {attempt + 1} attempts")
            return D
    witness = invariant[0].mapping if invariant else None
    raise SeedGenerationError(
        f"no {q} indicator seeds break {needed} of {len(non_trivial)} symmetries after {retry_cap} attempts; "
        f"last draw is invariant under {list(witness) if witness else witness}",
        invariant=witness,
    )
