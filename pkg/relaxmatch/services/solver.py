"""Convex relaxations of graph matching.

All solvers minimize ||P A - B P||_F^2 (plus a seed penalty where given) over a
relaxation of the permutation matrices:

* pseudo-stochastic: P 1 = 1, solved row by row in the eigenbases of A and B;
* doubly-stochastic: the Birkhoff polytope, by Frank-Wolfe (away steps on request);
* affine doubly-stochastic: P 1 = P^T 1 = 1 without sign constraints;
* seeded: pseudo-stochastic plus mu ||P C - D||_F^2.
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Graph, Permutation, check_same_order
from relaxmatch.schemas.solver import RelaxedSolution, SeedSet, SolverOptions
from relaxmatch.services.graph_core import relaxed_residual
from relaxmatch.services.projection import lap_min_cost
from relaxmatch.services.spectral import eig_sym
from relaxmatch.utils.errors import InfeasibleRowError, InvalidInputError

logger = logging.getLogger(__name__)


def cost_grid(lambdas_a: np.ndarray, lambdas_b: np.ndarray) -> np.ndarray:
    """c[i, j] = (lambda^A_j - lambda^B_i)^2."""
    return (lambdas_a[None, :] - lambdas_b[:, None]) ** 2


def gradient(A: Graph, B: Graph, P: np.ndarray, seeds: Optional[SeedSet] = None) -> np.ndarray:
    R = relaxed_residual(A, B, P)
    G = 2.0 * (R @ A.weights - B.weights @ R)
    if seeds is not None:
        G += 2.0 * seeds.mu * (P @ seeds.C - seeds.D) @ seeds.C.T
    return G


def objective(A: Graph, B: Graph, P: np.ndarray, seeds: Optional[SeedSet] = None) -> float:
    value = float(np.linalg.norm(relaxed_residual(A, B, P)) ** 2)
    if seeds is not None:
        value += seeds.mu * float(np.linalg.norm(P @ seeds.C - seeds.D) ** 2)
    return value


def row_stationarity(G: np.ndarray) -> float:
    """Norm of G after removing what the multipliers of P 1 = 1 can absorb."""
    return float(np.linalg.norm(G - G.mean(axis=1, keepdims=True)))


def row_col_stationarity(G: np.ndarray) -> float:
    centered = G - G.mean(axis=1, keepdims=True) - G.mean(axis=0, keepdims=True) + G.mean()
    return float(np.linalg.norm(centered))


def solve_constrained_row(
    c_row: np.ndarray, v: np.ndarray, b: float, zero_tol: float, overlap_tol: float, row: int = 0
) -> Tuple[np.ndarray, bool]:
    """min sum_j c_j f_j^2 subject to v . f = b, minimum-norm among minimizers.

    Returns the row and whether the minimizer is unique.
    """
    n = len(v)
    threshold = overlap_tol * math.sqrt(n)
    zero = c_row <= zero_tol
    n_zero = int(zero.sum())
    f = np.zeros(n)
    v_zero_sq = float(np.sum(v[zero] ** 2))
    if math.sqrt(v_zero_sq) >= threshold:
        # zero-cost coordinates absorb the constraint
        f[zero] = b * v[zero] / v_zero_sq
        return f, n_zero == 1
    rest = ~zero
    v_rest = v[rest]
    if np.linalg.norm(v_rest) < threshold:
        if abs(b) > threshold:
            raise InfeasibleRowError(row, b)
        return f, n_zero == 0
    c_rest = c_row[rest]
    scale = float(np.sum(v_rest ** 2 / c_rest))
    f[rest] = b * v_rest / (c_rest * scale)
    return f, n_zero == 0


def solve_pseudo_stochastic(A: Graph, B: Graph, opts: Optional[SolverOptions] = None) -> RelaxedSolution:
    opts = opts or SolverOptions()
    n = check_same_order(A.n, B.n)
    dec_a = eig_sym(A)
    dec_b = eig_sym(B)
    c = cost_grid(dec_a.lambdas, dec_b.lambdas)
    zero_tol = opts.zero_cost_rel * (dec_a.sigma + dec_b.sigma) ** 2

    F = np.zeros((n, n))
    non_unique: List[int] = []
    for i in range(n):
        F[i], unique = solve_constrained_row(c[i], dec_a.v, float(dec_b.v[i]), zero_tol, opts.overlap_tol, row=i)
        if not unique:
            non_unique.append(i)
    P = dec_b.U @ F @ dec_a.U.T

    if non_unique:
        logger.info(f"pseudo-stochastic minimizer is not unique: {len(non_unique)} degenerate rows, minimum-norm taken")
    return RelaxedSolution(
        P=P,
        constraint_kind="pseudo_stochastic",
        objective=objective(A, B, P),
        kkt_residual=row_stationarity(gradient(A, B, P)),
        iterations=1,
        unique=not non_unique,
        deficient_rows=non_unique,
    )


def _atom_score(G: np.ndarray, atom: Tuple[int, ...]) -> float:
    return float(G[np.arange(len(atom)), list(atom)].sum())


def solve_doubly_stochastic(A: Graph, B: Graph, opts: Optional[SolverOptions] = None) -> RelaxedSolution:
    """Frank-Wolfe over the Birkhoff polytope with exact line search.

    Plain Frank-Wolfe steps by default. With fw_away_steps the iterate is kept as an
    explicit convex combination of permutation matrices. Each linear minimization is a LAP.
    """
    opts = opts or SolverOptions()
    n = check_same_order(A.n, B.n)
    Wa = A.weights
    Wb = B.weights
    gap_tol = opts.fw_gap_rel * n * max(B.frobenius_norm ** 2, A.frobenius_norm ** 2)

    # barycenter as the average of the n cyclic shifts
    active: Dict[Tuple[int, ...], float] = {
        tuple((i + k) % n for i in range(n)): 1.0 / n for k in range(n)
    }
    P = np.full((n, n), 1.0 / n)
    gap = math.inf
    converged = False
    iteration = 0
    for iteration in range(1, opts.fw_max_iter + 1):
        R = P @ Wa - Wb @ P
        G = 2.0 * (R @ Wa - Wb @ R)
        toward = lap_min_cost(G).perm
        S = toward.matrix()
        gap = float(np.sum(G * (P - S)))
        if gap <= gap_tol:
            converged = True
            break

        step_away = False
        if opts.fw_away_steps and len(active) > 1:
            away_atom = max(sorted(active), key=lambda atom: _atom_score(G, atom))
            V = Permutation(mapping=away_atom).matrix()
            away_gain = float(np.sum(G * (V - P)))
            step_away = away_gain > gap
        if step_away:
            direction = P - V
            alpha = active[away_atom]
            gamma_max = alpha / (1.0 - alpha)
        else:
            direction = S - P
            gamma_max = 1.0

        E = direction @ Wa - Wb @ direction
        curvature = float(np.sum(E * E))
        if curvature <= 0.0:
            gamma = gamma_max
        else:
            gamma = min(max(-float(np.sum(R * E)) / curvature, 0.0), gamma_max)

        if step_away:
            for atom in active:
                active[atom] *= 1.0 + gamma
            active[away_atom] -= gamma
            if gamma >= gamma_max or active[away_atom] <= 0.0:
                del active[away_atom]
        else:
            if gamma >= 1.0:
                active = {toward.mapping: 1.0}
            else:
                for atom in active:
                    active[atom] *= 1.0 - gamma
                active[toward.mapping] = active.get(toward.mapping, 0.0) + gamma
        P = P + gamma * direction
        logger.debug(f"frank-wolfe {iteration}: gap {gap:.3e}, step {gamma:.3e}, {'away' if step_away else 'toward'}")

    if not converged:
        logger.warning(f"Frank-Wolfe stopped at the iteration cap {opts.fw_max_iter} with gap {gap:.3e} > {gap_tol:.3e}")
    return RelaxedSolution(
        P=P,
        constraint_kind="doubly_stochastic",
        objective=objective(A, B, P),
        kkt_residual=max(gap, 0.0),
        iterations=iteration,
        converged=converged,
        gap=gap,
    )


def _complement_of_ones(n: int) -> np.ndarray:
    centering = np.eye(n) - 1.0 / n
    Q, _ = np.linalg.qr(centering[:, : n - 1])
    return Q


def solve_affine_bistochastic(A: Graph, B: Graph, opts: Optional[SolverOptions] = None) -> RelaxedSolution:
    """Minimum-norm minimizer over {P : P 1 = P^T 1 = 1}, dense least squares."""
    opts = opts or SolverOptions()
    n = check_same_order(A.n, B.n)
    if n > settings.affine_max_n:
        raise InvalidInputError(
            f"affine doubly-stochastic solve is dense in n^2 unknowns; n={n} exceeds affine_max_n={settings.affine_max_n}"
        )
    P0 = np.full((n, n), 1.0 / n)
    unique = True
    if n > 1:
        Q = _complement_of_ones(n)
        eye = np.eye(n)
        # row-major vec: vec(P A) = (I kron A^T) vec P, vec(B P) = (B kron I) vec P
        K = np.kron(eye, A.weights.T) - np.kron(B.weights, eye)
        M = K @ np.kron(Q, Q)
        y, _, rank, _ = np.linalg.lstsq(M, -K @ P0.ravel(), rcond=opts.rank_tol)
        P = P0 + Q @ y.reshape(n - 1, n - 1) @ Q.T
        unique = rank == (n - 1) ** 2
    else:
        P = P0
    return RelaxedSolution(
        P=P,
        constraint_kind="affine_doubly",
        objective=objective(A, B, P),
        kkt_residual=row_col_stationarity(gradient(A, B, P)),
        iterations=1,
        unique=unique,
    )


def solve_seeded(A: Graph, B: Graph, seeds: SeedSet, opts: Optional[SolverOptions] = None) -> RelaxedSolution:
    """Seeded pseudo-stochastic relaxation, one bordered KKT system per row of F = U_B^T P U_A."""
    opts = opts or SolverOptions()
    n = check_same_order(A.n, B.n, seeds.C.shape[0])
    dec_a = eig_sym(A)
    dec_b = eig_sym(B)
    c = cost_grid(dec_a.lambdas, dec_b.lambdas)
    C_t = dec_a.U.T @ seeds.C
    D_t = dec_b.U.T @ seeds.D
    seed_gram = seeds.mu * (C_t @ C_t.T)

    F = np.zeros((n, n))
    deficient: List[int] = []
    kkt = np.zeros((n + 1, n + 1))
    kkt[:n, n] = dec_a.v
    kkt[n, :n] = dec_a.v
    for i in range(n):
        kkt[:n, :n] = 2.0 * (np.diag(c[i]) + seed_gram)
        rhs = np.concatenate([2.0 * seeds.mu * (C_t @ D_t[i]), [dec_b.v[i]]])
        singular_values = np.linalg.svd(kkt, compute_uv=False)
        if singular_values[-1] <= opts.rank_tol * singular_values[0]:
            deficient.append(i)
            solution = np.linalg.lstsq(kkt, rhs, rcond=opts.rank_tol)[0]
        else:
            solution = np.linalg.solve(kkt, rhs)
        F[i] = solution[:n]
    P = dec_b.U @ F @ dec_a.U.T

    if deficient:
        logger.warning(f"seeded system singular on rows {deficient}: minimum-norm completion, solution not unique")
    return RelaxedSolution(
        P=P,
        constraint_kind="pseudo_stochastic",
        seeded=True,
        objective=objective(A, B, P, seeds),
        kkt_residual=row_stationarity(gradient(A, B, P, seeds)),
        iterations=1,
        unique=not deficient,
        deficient_rows=deficient,
    )


def solve(
    A: Graph, B: Graph, opts: Optional[SolverOptions] = None, seeds: Optional[SeedSet] = None
) -> RelaxedSolution:
    """Dispatch on opts.constraint; seeds are supported by the pseudo-stochastic relaxation only."""
    opts = opts or SolverOptions()
    if seeds is not None:
        if opts.constraint != "pseudo":
            raise InvalidInputError(f"seeds require the pseudo-stochastic relaxation, got constraint={opts.constraint}")
        return solve_seeded(A, B, seeds, opts)
    if opts.constraint == "doubly":
        return solve_doubly_stochastic(A, B, opts)
    if opts.constraint == "affine":
        return solve_affine_bistochastic(A, B, opts)
    return solve_pseudo_stochastic(A, B, opts)
