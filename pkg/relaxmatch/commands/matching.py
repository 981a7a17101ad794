"""Two-graph commands: match and certify."""
import argparse
import logging

from relaxmatch.config import settings
from relaxmatch.schemas.solver import SeedSet, SolverOptions
from relaxmatch.services.certification import certify_uniqueness, check_seed_conditions, find_invariant_symmetry
from relaxmatch.services.ingestion import read_graph, read_seeds, report_json, write_report
from relaxmatch.services.oracle import enumerate_symmetries
from relaxmatch.services.pipeline import rgm

logger = logging.getLogger(__name__)

EXIT_INCONCLUSIVE = 4


def cmd_match(args: argparse.Namespace) -> int:
    """Relaxed matching of A onto B with a verdict"""
    A = read_graph(args.a)
    B = read_graph(args.b)
    opts = SolverOptions.from_pairs(
        args.opt,
        constraint=args.constraint,
        mu=args.mu,
        normalize=True if args.normalize else None,
    )
    seeds = None
    if args.seeds:
        C = read_seeds(args.seeds[0], A.n)
        D = read_seeds(args.seeds[1], B.n)
        seeds = SeedSet(C=C, D=D, mu=opts.mu)
    result = rgm(A, B, opts, seeds)
    summary = result.summary()
    print(report_json(summary))
    if args.out:
        write_report(summary, args.out)
    if args.strict and result.verdict == "inconclusive":
        logger.warning("verdict is inconclusive")
        return EXIT_INCONCLUSIVE
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    """Rank certificate of B, plus seed conditions and any seed-fixing symmetry when seeds are given"""
    B = read_graph(args.b)
    payload = {}
    seeds = None
    if args.seeds:
        D = read_seeds(args.seeds, B.n)
        # only D enters the certificate
        seeds = SeedSet(C=D, D=D, **({"mu": args.mu} if args.mu is not None else {}))
        payload["seed_conditions"] = check_seed_conditions(B, D)
        if B.n <= settings.oracle_limit:
            # exhaustive: a symmetry fixing D leaves the seeded problem degenerate
            witness = find_invariant_symmetry(D, enumerate_symmetries(B))
            payload["invariant_symmetry"] = list(witness.mapping) if witness else None
    certificate = certify_uniqueness(B, seeds)
    payload["certificate"] = certificate
    payload["deficient_rows"] = certificate.deficient_rows
    print(report_json(payload))
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    match_parser = subparsers.add_parser("match", help="match graph A onto graph B")
    match_parser.add_argument("a")
    match_parser.add_argument("b")
    match_parser.add_argument("--seeds", nargs=2, metavar=("C", "D"), help="seed files for A and B")
    match_parser.add_argument("--mu", type=float)
    match_parser.add_argument("--constraint", choices=["pseudo", "doubly", "affine"])
    match_parser.add_argument("--normalize", action="store_true", help="scale both graphs by 1/sigma(A)")
    match_parser.add_argument("--opt", action="append", default=[], metavar="KEY=VALUE")
    match_parser.add_argument("--strict", action="store_true", help="exit 4 on an inconclusive verdict")
    match_parser.add_argument("--out", help="write the JSON result here")
    match_parser.set_defaults(func=cmd_match)

    certify_parser = subparsers.add_parser("certify", help="uniqueness certificate for graph B")
    certify_parser.add_argument("b")
    certify_parser.add_argument("--seeds", metavar="D")
    certify_parser.add_argument("--mu", type=float)
    certify_parser.set_defaults(func=cmd_certify)
