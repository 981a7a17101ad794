import math

import numpy as np
import pytest

from relaxmatch.schemas.graph import Graph
from relaxmatch.services.bounds import (
    block_matrix,
    block_norm_bounds,
    bounds_for_report,
    lemma2_bound,
    normalize_spectral_radius,
    perturbation_bound_check,
    theorem3_bound,
)
from relaxmatch.services.spectral import analyze
from relaxmatch.utils.errors import DomainError, SingularSystemError

pytestmark = pytest.mark.unit


class TestRecoveryBounds:
    def test_normalized_bound(self):
        bound = theorem3_bound(1.0, 1.0, 4)
        assert bound.rho_max == pytest.approx(1.0 / 96.0)
        assert bound.normalized

    def test_scaled_bound_takes_the_smaller_term(self):
        assert lemma2_bound(1.0, 1.0, 1.0, 4).rho_max == pytest.approx(1.0 / 96.0)
        assert lemma2_bound(1.0, 100.0, 1.0, 4).rho_max == pytest.approx(math.sqrt(2.0))

    def test_bound_scales_with_sigma(self):
        assert lemma2_bound(0.5, 2.0, 2.0, 9).rho_max == pytest.approx(4.0 * 0.0625 / (12.0 * 2.0 * 27.0))

    @pytest.mark.parametrize("eps, delta, n", [(0.0, 1.0, 4), (1.5, 1.0, 4), (0.5, 0.0, 4), (0.5, 1.0, 1)])
    def test_domain(self, eps, delta, n):
        with pytest.raises(DomainError):
            theorem3_bound(eps, delta, n)

    def test_unfriendly_report_has_no_bound(self, path3):
        with pytest.raises(DomainError):
            bounds_for_report(analyze(path3))

    def test_bounds_for_friendly_report(self, friendly6):
        report = analyze(friendly6)
        scaled, normalized = bounds_for_report(report)
        assert normalized.rho_max == pytest.approx(
            theorem3_bound(report.epsilon, report.delta / report.sigma, 6).rho_max
        )
        assert scaled.rho_max <= math.sqrt(2.0) * report.sigma


class TestNormalization:
    def test_halves_weights_when_sigma_is_two(self):
        W = np.diag([2.0, -1.0, 0.5])
        normalized, scale = normalize_spectral_radius(Graph(weights=W))
        assert scale == pytest.approx(2.0)
        assert np.allclose(normalized.weights, W / 2.0)

    def test_already_normalized(self, friendly6):
        once, _ = normalize_spectral_radius(friendly6)
        twice, scale = normalize_spectral_radius(once)
        assert scale == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(np.linalg.eigvalsh(twice.weights))) == pytest.approx(1.0, abs=1e-9)

    def test_zero_matrix(self):
        with pytest.raises(DomainError):
            normalize_spectral_radius(Graph(weights=np.zeros((3, 3))))


class TestPerturbation:
    def test_zero_perturbation(self):
        report = perturbation_bound_check(np.eye(3), np.zeros((3, 3)), 0.3, np.ones(3))
        assert report.lhs == 0.0 and report.rhs == 0.0 and report.holds

    def test_hand_computed_case(self):
        c = np.array([1.0, 0.0])
        report = perturbation_bound_check(np.eye(2), np.eye(2), 0.5, c)
        assert report.lhs == pytest.approx(1.0 / 3.0)
        assert report.rhs == pytest.approx(1.0)
        assert report.precondition_met and report.holds

    def test_vacuous_when_contraction_reaches_one(self):
        report = perturbation_bound_check(np.eye(2), np.diag([1.0, 0.0]), 2.0, np.ones(2))
        assert not report.precondition_met
        assert report.rhs == math.inf

    def test_singular_system(self):
        with pytest.raises(SingularSystemError):
            perturbation_bound_check(np.zeros((2, 2)), np.eye(2), 0.1, np.ones(2))

    def test_random_admissible_systems(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            n = int(rng.integers(2, 10))
            M = rng.standard_normal((n, n)) + n * np.eye(n)
            N = rng.standard_normal((n, n))
            limit = np.linalg.svd(M, compute_uv=False)[-1] / np.linalg.svd(N, compute_uv=False)[0]
            report = perturbation_bound_check(M, N, 0.9 * limit * rng.random(), rng.standard_normal(n))
            assert report.precondition_met and report.holds


class TestBlockNorms:
    def test_block_matrix(self):
        M = block_matrix(np.array([1.0, 2.0, 3.0]), 1)
        assert np.array_equal(M[1], [1.0, 2.0, 3.0])
        assert M[0, 0] == 1.0 and M[2, 2] == 1.0

    def test_bound_holds_for_friendly_overlaps(self, friendly6):
        report = analyze(friendly6)
        result = block_norm_bounds(report.decomposition.v, 0.999 * report.epsilon)
        assert result.precondition_met and result.holds
        assert len(result.per_row) == 6

    def test_precondition(self):
        result = block_norm_bounds(np.array([1.0, 0.1, 1.0]), 0.5)
        assert not result.precondition_met and not result.holds
