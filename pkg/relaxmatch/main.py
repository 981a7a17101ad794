import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from relaxmatch import __version__
from relaxmatch.commands import experiments, graphs, matching
from relaxmatch.config import settings
from relaxmatch.utils.errors import RelaxMatchError

logger = logging.getLogger("relaxmatch")

EXIT_INVALID_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaxmatch",
        description="Convex-relaxation graph matching with recovery certificates",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help=f"logging level (default {settings.log_level})")
    subparsers = parser.add_subparsers(dest="command", required=True)
    graphs.register(subparsers)
    matching.register(subparsers)
    experiments.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except RelaxMatchError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"{args.command} rejected its input: {e}")
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
