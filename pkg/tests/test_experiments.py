import csv

import pytest

from relaxmatch.config import settings
from relaxmatch.schemas.experiment import NoiseSweepConfig, SeedSweepConfig, SymmetricFamily
from relaxmatch.services.experiments import (
    CSV_HEADER,
    experiment_noise_sweep,
    experiment_seed_sweep,
    noise_instance,
    seed_trial,
    write_csv,
)
from relaxmatch.utils.errors import InvalidInputError

pytestmark = pytest.mark.integration


@pytest.fixture
def noise_config():
    return NoiseSweepConfig(sizes=[5, 6], instances=4, multipliers=[0.25, 0.5], rng_seed=3)


@pytest.fixture
def seed_config():
    return SeedSweepConfig(families=[SymmetricFamily(n=6, l=1)], ratios=[0.0, 1.0], trials=3, rng_seed=2)


def read_rows(path):
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    return list(csv.DictReader(lines[1:]))


class TestNoiseSweep:
    def test_records_and_summaries(self, noise_config):
        records = experiment_noise_sweep(noise_config, jobs=1)
        trials = [r for r in records if r.record == "trial"]
        summaries = [r for r in records if r.record == "summary"]
        assert [r.trial_id for r in trials] == list(range(8))
        assert {r.n for r in trials} == {5, 6}
        assert all(r.success for r in trials)
        overall = [r for r in summaries if r.n is None]
        assert [(r.level, r.success_rate, r.trials) for r in overall] == [(0.25, 1.0, 4), (0.5, 1.0, 4)]
        assert len(summaries) == 6

    def test_instance_is_independent_of_run_order(self, noise_config):
        first = noise_instance(noise_config, 2)
        second = noise_instance(noise_config, 2)
        assert [r.model_dump(exclude={"runtime"}) for r in first] == [r.model_dump(exclude={"runtime"}) for r in second]

    def test_csv_is_reproducible(self, noise_config, tmp_path):
        paths = []
        for jobs, name in [(1, "serial.csv"), (2, "parallel.csv")]:
            path = tmp_path / name
            write_csv(experiment_noise_sweep(noise_config, jobs=jobs), path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()
        rows = read_rows(paths[0])
        assert "runtime" not in rows[0]
        assert rows[0]["success"] == "1"

    def test_timings_column(self, noise_config, tmp_path):
        path = tmp_path / "timed.csv"
        write_csv(experiment_noise_sweep(noise_config), path, timings=True)
        rows = read_rows(path)
        assert float(rows[0]["runtime"]) >= 0.0
        assert rows[-1]["runtime"] == ""

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            NoiseSweepConfig(sizes=[1])
        with pytest.raises(InvalidInputError):
            NoiseSweepConfig(multipliers=[])


class TestSeedSweep:
    def test_full_seeding_recovers_planted_map(self, seed_config):
        records = seed_trial(seed_config, 0, 0)
        unseeded, seeded = records
        assert (unseeded.q, seeded.q) == (0, 1)
        assert unseeded.l == 1
        assert not unseeded.success and unseeded.projected_in_iso
        assert unseeded.reason == "relaxed solution is not a permutation"
        assert seeded.success and seeded.conditions_ok
        assert seeded.distortion == 0.0

    def test_summary_reports_family_spread(self, seed_config):
        records = experiment_seed_sweep(seed_config)
        overall = {r.level: r for r in records if r.record == "summary" and r.n is None}
        assert overall[1.0].success_rate == 1.0
        assert overall[0.0].success_rate == 0.0
        assert overall[1.0].min_rate == overall[1.0].max_rate == 1.0
        assert overall[1.0].trials == 3

    def test_multiple_mus(self):
        config = SeedSweepConfig(
            families=[SymmetricFamily(n=6, l=3)], ratios=[1.0], trials=2, mus=[1e-3, 1e3], rng_seed=5
        )
        trials = [r for r in experiment_seed_sweep(config) if r.record == "trial"]
        assert [r.mu for r in trials] == [1e-3, 1e3, 1e-3, 1e3]
        assert all(r.success for r in trials)

    def test_ratios_must_be_fractions(self):
        with pytest.raises(InvalidInputError):
            SeedSweepConfig(ratios=[1.5])

    def test_seed_count_is_capped_at_order(self):
        # eight symmetries on six vertices: ratio 1 asks for seven seeds
        config = SeedSweepConfig(families=[SymmetricFamily(n=6, l=7)], ratios=[0.0, 1.0], trials=1, rng_seed=4)
        unseeded, seeded = seed_trial(config, 0, 0)
        assert unseeded.q == 0 and unseeded.l == 7
        assert seeded.q == 6
        assert seeded.success, seeded.reason
        assert seeded.distortion == 0.0

    def test_failed_instance_draws_are_recorded(self, seed_config, monkeypatch):
        monkeypatch.setattr(settings, "symmetric_resample_cap", 0)
        records = experiment_seed_sweep(seed_config)
        trials = [r for r in records if r.record == "trial"]
        assert len(trials) == 6
        assert not any(r.success for r in trials)
        assert all(r.reason.startswith("instance generation failed") for r in trials)
        assert [r.q for r in trials[:2]] == [0, 1]
