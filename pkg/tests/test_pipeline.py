import numpy as np
import pytest

from relaxmatch.schemas.graph import Permutation
from relaxmatch.schemas.solver import SeedSet, SolverOptions
from relaxmatch.services.bounds import theorem3_bound
from relaxmatch.services.certification import indicator_seeds
from relaxmatch.services.generators import add_noise, graph_from_spectrum, random_friendly_graph, random_permutation
from relaxmatch.services.graph_core import apply_isomorphism, distortion
from relaxmatch.services.pipeline import exactness_tolerance, rgm
from relaxmatch.utils.errors import DimensionMismatchError

pytestmark = pytest.mark.unit


def test_friendly_isomorphic_pair_is_exact(planted_pair):
    A, B, p = planted_pair
    result = rgm(A, B)
    assert result.verdict == "exact_isomorphism"
    assert result.perm == p
    assert result.distortion <= result.tolerance
    assert result.friendly_a and result.friendly_b
    assert set(result.timings) >= {"classify", "solve", "project", "total"}


@pytest.mark.parametrize("constraint", ["doubly", "affine"])
def test_other_relaxations_recover_planted_map(planted_pair, constraint):
    A, B, p = planted_pair
    result = rgm(A, B, SolverOptions(constraint=constraint))
    assert result.perm == p
    assert result.verdict == "exact_isomorphism"


def test_noise_within_bound_is_within_rho():
    A = graph_from_spectrum(np.linspace(-1.0, 1.0, 4), rng_seed=3).graph
    p = Permutation(mapping=(2, 0, 3, 1))
    bound = theorem3_bound(1.0 - 1e-9, 2.0 / 3.0, 4).rho_max
    B = add_noise(apply_isomorphism(A, p), 0.5 * bound, rng_seed=8)
    result = rgm(A, B)
    assert result.perm == p
    assert result.verdict == "within_rho"
    assert result.distortion == pytest.approx(0.5 * bound, rel=1e-9)
    assert result.bound.rho_max == pytest.approx(bound, rel=1e-6)


def test_unrelated_friendly_graphs_are_certified_non_isomorphic():
    A = random_friendly_graph(5, rng_seed=1).graph
    B = random_friendly_graph(5, rng_seed=2).graph
    result = rgm(A, B)
    assert result.verdict == "not_isomorphic_certified"
    assert result.distortion > exactness_tolerance(A, B, 1e-7)


def test_unfriendly_pair_without_seeds_is_inconclusive(path3):
    result = rgm(path3, path3)
    assert result.verdict == "inconclusive"
    assert result.bound is None


def test_full_rank_seeds_make_symmetric_pair_exact(two_edges):
    p = Permutation(mapping=(3, 2, 1, 0))
    B = apply_isomorphism(two_edges, p)
    C = indicator_seeds(4, [0, 2])
    result = rgm(two_edges, B, seeds=SeedSet(C=C, D=p.matrix() @ C))
    assert result.certificate.full_rank
    assert result.verdict == "exact_isomorphism"
    assert result.perm == p
    assert "certify" in result.timings


def test_normalization_keeps_original_distortion(planted_pair):
    A, B, p = planted_pair
    scaled = A.scaled(3.0)
    result = rgm(scaled, B.scaled(3.0), SolverOptions(normalize=True))
    assert result.scale == pytest.approx(3.0 * np.max(np.abs(np.linalg.eigvalsh(A.weights))))
    assert result.perm == p
    assert result.distortion == distortion(scaled, B.scaled(3.0), p)


def test_summary_is_serializable(planted_pair):
    A, B, _ = planted_pair
    summary = rgm(A, B).summary()
    assert summary["verdict"] == "exact_isomorphism"
    assert "P" not in summary["relaxed"]


def test_dimension_mismatch(path3, two_edges):
    with pytest.raises(DimensionMismatchError):
        rgm(path3, two_edges)


def test_solver_tolerances_reach_classification():
    A = graph_from_spectrum([0.0, 1.0, 1.001, 3.0], rng_seed=5).graph
    p = Permutation(mapping=(1, 3, 0, 2))
    B = apply_isomorphism(A, p)
    assert rgm(A, B).verdict == "exact_isomorphism"
    result = rgm(A, B, SolverOptions(gap_tol_rel=1e-2))
    assert not result.friendly_a and not result.friendly_b
    assert result.verdict == "inconclusive"


def test_relabeling_either_graph_relabels_the_match():
    for t in range(20):
        n = 5 + t % 4
        A = random_friendly_graph(n, rng_seed=100 + t).graph
        planted = apply_isomorphism(A, random_permutation(n, rng_seed=200 + t))
        B = add_noise(planted, 0.05 * A.frobenius_norm, rng_seed=300 + t)
        base = rgm(A, B)
        r = random_permutation(n, rng_seed=400 + t)
        s = random_permutation(n, rng_seed=500 + t)

        moved_a = rgm(apply_isomorphism(A, r), B)
        assert moved_a.perm == base.perm.compose(r.inverse()), f"trial {t}"
        assert np.allclose(moved_a.relaxed.P, base.relaxed.P @ r.matrix().T, atol=1e-7)

        moved_b = rgm(A, apply_isomorphism(B, s))
        assert moved_b.perm == s.compose(base.perm), f"trial {t}"
        assert moved_b.distortion == pytest.approx(base.distortion, rel=1e-9)
        assert moved_a.verdict == moved_b.verdict == base.verdict
