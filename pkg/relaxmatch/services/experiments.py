"""Noise and seed sweeps over random instances, written as versioned CSV.

Every instance draws from its own stream derived from (master seed, indices),
so results do not depend on the number of worker processes.
"""
import csv
import logging
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from relaxmatch.config import settings
from relaxmatch.schemas.experiment import ExperimentRecord, NoiseSweepConfig, SeedSweepConfig
from relaxmatch.schemas.solver import SeedSet
from relaxmatch.services.bounds import normalize_spectral_radius, theorem3_bound
from relaxmatch.services.certification import check_seed_conditions, find_invariant_symmetry, generate_seeds
from relaxmatch.services.generators import add_noise, random_friendly_graph, random_permutation, random_symmetric_instance
from relaxmatch.services.graph_core import apply_isomorphism, distortion
from relaxmatch.services.pipeline import rgm
from relaxmatch.services.projection import project_to_permutation
from relaxmatch.services.solver import solve_pseudo_stochastic, solve_seeded
from relaxmatch.services.spectral import analyze
from relaxmatch.utils.errors import InvalidInputError, ResampleLimitError, SeedGenerationError

logger = logging.getLogger(__name__)

CSV_HEADER = "# relaxmatch-csv v1"
CSV_FIELDS = [
    "record", "experiment", "trial_id", "instance", "n", "l", "epsilon", "delta", "level", "rho",
    "q", "mu", "success", "distortion", "conditions_ok", "projected_in_iso", "success_rate", "min_rate",
    "max_rate", "trials", "reason",
]
EXACT_RELAXATION_TOL = 1e-5


def _stream(*keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(keys)))


def _run_jobs(func: Callable, args: Sequence[Tuple], jobs: int) -> List[ExperimentRecord]:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(func, *zip(*args)))
    else:
        batches = [func(*a) for a in args]
    records = [r for batch in batches for r in batch]
    return sorted(records, key=lambda r: r.trial_id)


def noise_instance(config: NoiseSweepConfig, instance: int) -> List[ExperimentRecord]:
    """One friendly graph, normalized to sigma = 1, matched against noisy planted copies at every level."""
    n = config.sizes[instance % len(config.sizes)]
    friendly = random_friendly_graph(n, _stream(config.rng_seed, instance, 0))
    A, _ = normalize_spectral_radius(friendly.graph)
    report = analyze(A)
    bound = theorem3_bound(report.epsilon, report.delta, n).rho_max
    planted = random_permutation(n, _stream(config.rng_seed, instance, 1))
    B0 = apply_isomorphism(A, planted)

    per_instance = len(config.multipliers) * config.repeats
    records = []
    for j, multiplier in enumerate(config.multipliers):
        for r in range(config.repeats):
            started = time.perf_counter()
            rho = multiplier * bound
            B = add_noise(B0, rho, _stream(config.rng_seed, instance, 2, j, r))
            result = rgm(A, B)
            records.append(
                ExperimentRecord(
                    experiment="noise_sweep",
                    trial_id=instance * per_instance + j * config.repeats + r,
                    instance=instance,
                    n=n,
                    epsilon=report.epsilon,
                    delta=report.delta,
                    level=multiplier,
                    rho=rho,
                    success=result.perm.mapping == planted.mapping,
                    distortion=result.distortion,
                    reason=result.verdict,
                    runtime=time.perf_counter() - started,
                )
            )
    return records


def _failed_trial(config: SeedSweepConfig, family_index: int, trial: int, reason: str) -> List[ExperimentRecord]:
    family = config.families[family_index]
    per_trial = len(config.ratios) * len(config.mus)
    base_id = (family_index * config.trials + trial) * per_trial
    return [
        ExperimentRecord(
            experiment="seed_sweep",
            trial_id=base_id + ri * len(config.mus) + mi,
            instance=trial,
            n=family.n,
            l=family.l,
            level=ratio,
            q=min(math.ceil(ratio * family.l - 1e-12), family.n),
            mu=mu,
            success=False,
            reason=reason,
        )
        for ri, ratio in enumerate(config.ratios)
        for mi, mu in enumerate(config.mus)
    ]


def seed_trial(config: SeedSweepConfig, family_index: int, trial: int) -> List[ExperimentRecord]:
    """One symmetric instance with a planted permutation, solved at every seed ratio and mu.

    The seed count q = ceil(ratio * l) is capped at n. Failures to draw the
    instance or its seeds are recorded as failed trials with a reason.
    """
    family = config.families[family_index]
    try:
        A, sym_a = random_symmetric_instance(family.n, family.l, _stream(config.rng_seed, family_index, trial, 0))
    except ResampleLimitError as e:
        logger.warning(f"family (n={family.n}, l={family.l}) trial {trial}: {e.detail}")
        return _failed_trial(config, family_index, trial, f"instance generation failed: {e.detail}")
    planted = random_permutation(family.n, _stream(config.rng_seed, family_index, trial, 1))
    B = apply_isomorphism(A, planted)
    sym_b = sym_a.conjugate(planted)
    isomorphisms = sym_a.coset(planted)
    l = len(sym_a) - 1

    per_trial = len(config.ratios) * len(config.mus)
    base_id = (family_index * config.trials + trial) * per_trial
    records = []
    for ri, ratio in enumerate(config.ratios):
        q = min(math.ceil(ratio * l - 1e-12), family.n)
        D = None
        conditions_ok = None
        # with every symmetry broken the seeded minimizer is the planted permutation
        breaks_all = False
        failure = ""
        if q > 0:
            try:
                D = generate_seeds(B, sym_b, q, _stream(config.rng_seed, family_index, trial, 2, ri), required=q)
                conditions_ok = check_seed_conditions(B, D).passed
                breaks_all = find_invariant_symmetry(D, sym_b) is None
            except (SeedGenerationError, InvalidInputError) as e:
                failure = f"seed generation failed: {e.detail}"
        for mi, mu in enumerate(config.mus):
            started = time.perf_counter()
            record = ExperimentRecord(
                experiment="seed_sweep",
                trial_id=base_id + ri * len(config.mus) + mi,
                instance=trial,
                n=family.n,
                l=l,
                level=ratio,
                q=q,
                mu=mu,
                conditions_ok=conditions_ok,
            )
            if failure:
                records.append(record.model_copy(update={"success": False, "reason": failure}))
                continue
            if D is None:
                relaxed = solve_pseudo_stochastic(A, B)
            else:
                C = planted.matrix().T @ D
                relaxed = solve_seeded(A, B, SeedSet(C=C, D=D, mu=mu))
            perm = project_to_permutation(relaxed.P).perm
            in_iso = perm in isomorphisms
            exact = float(np.linalg.norm(relaxed.P - perm.matrix())) <= EXACT_RELAXATION_TOL
            success = in_iso and exact and (not breaks_all or perm.mapping == planted.mapping)
            if success:
                reason = ""
            elif not in_iso:
                reason = "projection is not an isomorphism"
            elif not exact:
                reason = "relaxed solution is not a permutation"
            else:
                reason = "recovered a different isomorphism"
            records.append(
                record.model_copy(
                    update={
                        "success": success,
                        "projected_in_iso": in_iso,
                        "distortion": distortion(A, B, perm),
                        "reason": reason,
                        "runtime": time.perf_counter() - started,
                    }
                )
            )
    return records


def _rate(records: Iterable[ExperimentRecord]) -> Tuple[float, int]:
    outcomes = [bool(r.success) for r in records]
    return (sum(outcomes) / len(outcomes) if outcomes else math.nan), len(outcomes)


def summarize_noise(records: List[ExperimentRecord]) -> List[ExperimentRecord]:
    by_level: Dict[float, List[ExperimentRecord]] = defaultdict(list)
    by_level_n: Dict[Tuple[float, int], List[ExperimentRecord]] = defaultdict(list)
    for r in records:
        by_level[r.level].append(r)
        by_level_n[(r.level, r.n)].append(r)
    summary = []
    for level in sorted(by_level):
        rate, trials = _rate(by_level[level])
        summary.append(
            ExperimentRecord(record="summary", experiment="noise_sweep", level=level, success_rate=rate, trials=trials)
        )
        for (lvl, n) in sorted(k for k in by_level_n if k[0] == level):
            rate, trials = _rate(by_level_n[(lvl, n)])
            summary.append(
                ExperimentRecord(
                    record="summary", experiment="noise_sweep", level=level, n=n, success_rate=rate, trials=trials
                )
            )
    return summary


def summarize_seeds(records: List[ExperimentRecord]) -> List[ExperimentRecord]:
    groups: Dict[Tuple[float, float], Dict[Tuple[int, int], List[ExperimentRecord]]] = defaultdict(
        lambda: defaultdict(list)
    )
    for r in records:
        groups[(r.level, r.mu)][(r.n, r.l)].append(r)
    summary = []
    for (level, mu) in sorted(groups):
        families = groups[(level, mu)]
        rates = {key: _rate(rows) for key, rows in sorted(families.items())}
        values = [rate for rate, _ in rates.values()]
        summary.append(
            ExperimentRecord(
                record="summary",
                experiment="seed_sweep",
                level=level,
                mu=mu,
                success_rate=float(np.mean(values)),
                min_rate=min(values),
                max_rate=max(values),
                trials=sum(t for _, t in rates.values()),
            )
        )
        for (n, l), (rate, trials) in rates.items():
            summary.append(
                ExperimentRecord(
                    record="summary", experiment="seed_sweep", level=level, mu=mu, n=n, l=l,
                    success_rate=rate, min_rate=rate, max_rate=rate, trials=trials,
                )
            )
    return summary


def experiment_noise_sweep(config: NoiseSweepConfig, jobs: Optional[int] = None) -> List[ExperimentRecord]:
    jobs = settings.jobs if jobs is None else jobs
    logger.info(f"noise sweep: {config.instances} instances, multipliers {config.multipliers}, jobs={jobs}")
    trials = _run_jobs(noise_instance, [(config, i) for i in range(config.instances)], jobs)
    return trials + summarize_noise(trials)


def experiment_seed_sweep(config: SeedSweepConfig, jobs: Optional[int] = None) -> List[ExperimentRecord]:
    jobs = settings.jobs if jobs is None else jobs
    logger.info(f"seed sweep: {len(config.families)} families x {config.trials} trials, ratios {config.ratios}")
    args = [(config, f, t) for f in range(len(config.families)) for t in range(config.trials)]
    trials = _run_jobs(seed_trial, args, jobs)
    return trials + summarize_seeds(trials)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


def write_csv(records: List[ExperimentRecord], path: Path, timings: bool = False) -> None:
    fields = CSV_FIELDS + (["runtime"] if timings else [])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(CSV_HEADER + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(fields)
        for record in records:
            data = record.model_dump()
            writer.writerow([_cell(data[field]) for field in fields])
    logger.info(f"wrote {len(records)} rows to {path}")
