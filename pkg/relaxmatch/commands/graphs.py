"""Single-graph commands: analyze, bound, oracle, gen."""
import argparse
import logging

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Graph
from relaxmatch.services.bounds import bounds_for_report, lemma2_bound, theorem3_bound
from relaxmatch.services.generators import random_friendly_graph, random_symmetric_instance
from relaxmatch.services.certification import generate_seeds
from relaxmatch.services.ingestion import read_graph, report_json, write_graph, write_report, write_seeds
from relaxmatch.services.oracle import brute_force_min_distortion, enumerate_isomorphisms
from relaxmatch.services.spectral import analyze
from relaxmatch.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


def cmd_analyze(args: argparse.Namespace) -> int:
    """Friendliness report of one graph"""
    graph = read_graph(args.graph)
    report = analyze(graph)
    print(report.summary())
    print(report_json(report))
    if args.out:
        write_report(report, args.out)
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    """Recovery bounds from a graph or from explicit epsilon, delta, sigma, n"""
    if args.graph:
        report = analyze(read_graph(args.graph))
        scaled, normalized = bounds_for_report(report)
        payload = {"scaled": scaled, "normalized": normalized}
    else:
        if args.eps is None or args.delta is None or args.n is None:
            raise InvalidInputError("bound needs a graph file or all of --eps, --delta and --n")
        payload = {
            "scaled": lemma2_bound(args.eps, args.delta, args.sigma, args.n),
            # delta rescaled to a unit spectral radius
            "normalized": theorem3_bound(args.eps, args.delta / args.sigma, args.n),
        }
    print(report_json(payload))
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    """Exhaustive isomorphism search for small graphs"""
    A = read_graph(args.a)
    B = read_graph(args.b)
    limit = args.oracle_limit or settings.oracle_limit
    isos = enumerate_isomorphisms(A, B, rho=args.rho, oracle_limit=limit)
    payload = {"count": len(isos), "isomorphisms": [list(p.mapping) for p in isos.elements]}
    if args.min_distortion:
        perm, value = brute_force_min_distortion(A, B, oracle_limit=limit)
        payload["min_distortion"] = {"perm": list(perm.mapping), "distortion": value}
    print(report_json(payload))
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate a friendly graph or a graph with l non-trivial symmetries"""
    if args.kind == "friendly":
        instance = random_friendly_graph(args.n, args.seed)
        graph: Graph = instance.graph
        logger.info(f"friendly graph: epsilon={instance.epsilon:.3e}, delta={instance.delta:.3e}")
    else:
        graph, group = random_symmetric_instance(args.n, args.l, args.seed)
        logger.info(f"symmetric graph with {len(group) - 1} non-trivial symmetries")
        if args.seeds_out:
            q = args.q if args.q is not None else min(max(len(group) - 1, 1), graph.n)
            write_seeds(generate_seeds(graph, group, q, args.seed), args.seeds_out)
    write_graph(graph, args.out)
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    analyze_parser = subparsers.add_parser("analyze", help="friendliness report of a graph")
    analyze_parser.add_argument("graph")
    analyze_parser.add_argument("--out", help="write the JSON report here")
    analyze_parser.set_defaults(func=cmd_analyze)

    bound_parser = subparsers.add_parser("bound", help="noise level up to which recovery is guaranteed")
    bound_parser.add_argument("graph", nargs="?")
    bound_parser.add_argument("--eps", type=float)
    bound_parser.add_argument("--delta", type=float)
    bound_parser.add_argument("--sigma", type=float, default=1.0)
    bound_parser.add_argument("--n", type=int)
    bound_parser.set_defaults(func=cmd_bound)

    oracle_parser = subparsers.add_parser("oracle", help="enumerate isomorphisms exhaustively")
    oracle_parser.add_argument("a")
    oracle_parser.add_argument("b")
    oracle_parser.add_argument("--rho", type=float, default=0.0)
    oracle_parser.add_argument("--oracle-limit", type=int)
    oracle_parser.add_argument("--min-distortion", action="store_true", help="also report the global minimizer")
    oracle_parser.set_defaults(func=cmd_oracle)

    gen_parser = subparsers.add_parser("gen", help="generate a random graph")
    gen_parser.add_argument("kind", choices=["friendly", "symmetric"])
    gen_parser.add_argument("--n", type=int, required=True)
    gen_parser.add_argument("--l", type=int, default=0, help="non-trivial symmetries (symmetric only)")
    gen_parser.add_argument("--seed", type=int)
    gen_parser.add_argument("--out", required=True)
    gen_parser.add_argument("--seeds-out", help="symmetric only: also write indicator seeds breaking every symmetry")
    gen_parser.add_argument("--q", type=int, help="number of seeds for --seeds-out (default: l, at most n)")
    gen_parser.set_defaults(func=cmd_gen)
