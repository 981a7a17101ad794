"""Two-step relaxed graph matching: solve a convex relaxation, project onto permutations."""
import logging
import time
from typing import Optional

from relaxmatch.schemas.graph import Graph, check_same_order
from relaxmatch.schemas.matching import MatchResult, RecoveryBound
from relaxmatch.schemas.solver import SeedSet, SolverOptions, UniquenessCertificate
from relaxmatch.services.bounds import theorem3_bound
from relaxmatch.services.certification import certify_uniqueness
from relaxmatch.services.graph_core import distortion
from relaxmatch.services.projection import project_to_permutation
from relaxmatch.services.solver import solve
from relaxmatch.services.spectral import analyze

logger = logging.getLogger(__name__)


def exactness_tolerance(A: Graph, B: Graph, rel: float) -> float:
    return rel * (1.0 + A.frobenius_norm + B.frobenius_norm)


def rgm(
    A: Graph,
    B: Graph,
    opts: Optional[SolverOptions] = None,
    seeds: Optional[SeedSet] = None,
) -> MatchResult:
    """Classify, optionally normalize, solve, project, and decide a verdict.

    Verdicts:
      exact_isomorphism         zero projected distortion on a friendly pair, or on a
                                seeded pair whose seeded certificate is full rank;
      within_rho                friendly pair whose normalized distortion is under the recovery bound;
      not_isomorphic_certified  friendly pair with nonzero projected distortion;
      inconclusive              everything else.
    """
    opts = opts or SolverOptions()
    n = check_same_order(A.n, B.n)
    timings = {}
    started = time.perf_counter()

    report_a = analyze(A, opts.gap_tol_rel, opts.overlap_tol)
    report_b = analyze(B, opts.gap_tol_rel, opts.overlap_tol)
    friendly = report_a.is_friendly and report_b.is_friendly
    timings["classify"] = time.perf_counter() - started
    logger.info(f"rgm n={n}: friendly A={report_a.is_friendly}, B={report_b.is_friendly}")

    scale = report_a.sigma if opts.normalize and report_a.sigma > 0 else 1.0
    A_s, B_s = (A.scaled(1.0 / scale), B.scaled(1.0 / scale)) if scale != 1.0 else (A, B)

    tick = time.perf_counter()
    relaxed = solve(A_s, B_s, opts, seeds)
    timings["solve"] = time.perf_counter() - tick

    tick = time.perf_counter()
    assignment = project_to_permutation(relaxed.P)
    timings["project"] = time.perf_counter() - tick

    dis = distortion(A, B, assignment.perm)
    tol = exactness_tolerance(A, B, opts.exact_tol_rel)

    certificate: Optional[UniquenessCertificate] = None
    if seeds is not None and opts.certify:
        tick = time.perf_counter()
        certificate = certify_uniqueness(B_s, seeds, opts.rank_tol, opts.gap_tol_rel, opts.overlap_tol)
        timings["certify"] = time.perf_counter() - tick

    bound: Optional[RecoveryBound] = None
    if friendly and n >= 2 and report_a.sigma > 0:
        bound = theorem3_bound(report_a.epsilon, report_a.delta / report_a.sigma, n)

    if dis <= tol and (friendly or (certificate is not None and certificate.full_rank)):
        verdict = "exact_isomorphism"
    elif friendly and bound is not None and dis / report_a.sigma < bound.rho_max:
        verdict = "within_rho"
    elif friendly and dis > tol:
        verdict = "not_isomorphic_certified"
    else:
        verdict = "inconclusive"
    timings["total"] = time.perf_counter() - started
    logger.info(f"rgm verdict {verdict}: distortion {dis:.3e} (tolerance {tol:.3e})")

    return MatchResult(
        relaxed=relaxed,
        perm=assignment.perm,
        distortion=dis,
        tolerance=tol,
        verdict=verdict,
        friendly_a=report_a.is_friendly,
        friendly_b=report_b.is_friendly,
        scale=scale,
        bound=bound,
        certificate=certificate,
        timings=timings,
    )
