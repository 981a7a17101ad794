"""Experiment commands: noise-sweep and seed-sweep."""
import argparse
import logging

from relaxmatch.schemas.experiment import NoiseSweepConfig, SeedSweepConfig
from relaxmatch.services.experiments import experiment_noise_sweep, experiment_seed_sweep, write_csv
from relaxmatch.services.ingestion import load_config

logger = logging.getLogger(__name__)

SWEEPS = {
    "noise-sweep": (NoiseSweepConfig, experiment_noise_sweep),
    "seed-sweep": (SeedSweepConfig, experiment_seed_sweep),
}


def cmd_experiment(args: argparse.Namespace) -> int:
    model, run = SWEEPS[args.sweep]
    config = load_config(args.config, model) if args.config else model()
    if args.rng_seed is not None:
        config = config.model_copy(update={"rng_seed": args.rng_seed})
    records = run(config, jobs=args.jobs)
    write_csv(records, args.out, timings=args.timings)
    summaries = [r for r in records if r.record == "summary" and r.n is None]
    for row in summaries:
        print(f"level {row.level:g}: success rate {row.success_rate:.3f} over {row.trials} trials")
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("experiment", help="run a reproducible sweep and write CSV")
    parser.add_argument("sweep", choices=sorted(SWEEPS))
    parser.add_argument("--config", help="JSON configuration; defaults are used when omitted")
    parser.add_argument("--out", required=True)
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--rng-seed", type=int)
    parser.add_argument("--timings", action="store_true", help="add a runtime column (not reproducible)")
    parser.set_defaults(func=cmd_experiment)
