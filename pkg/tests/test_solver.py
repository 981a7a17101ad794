import numpy as np
import pytest

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Graph, Permutation
from relaxmatch.schemas.solver import SeedSet, SolverOptions
from relaxmatch.services.certification import indicator_seeds
from relaxmatch.services.generators import add_noise
from relaxmatch.services.graph_core import apply_isomorphism
from relaxmatch.services.projection import project_to_permutation
from relaxmatch.services.solver import (
    cost_grid,
    solve,
    solve_affine_bistochastic,
    solve_constrained_row,
    solve_doubly_stochastic,
    solve_pseudo_stochastic,
    solve_seeded,
)
from relaxmatch.utils.errors import InfeasibleRowError, InvalidInputError

pytestmark = pytest.mark.unit


class TestConstrainedRow:
    def test_interior_solution(self):
        f, unique = solve_constrained_row(np.array([1.0, 4.0]), np.array([1.0, 1.0]), 1.0, 1e-12, 1e-8)
        assert np.allclose(f, [0.8, 0.2])
        assert unique

    def test_zero_cost_coordinate_absorbs_constraint(self):
        f, unique = solve_constrained_row(np.array([0.0, 1.0]), np.array([2.0, 1.0]), 1.0, 1e-12, 1e-8)
        assert np.allclose(f, [0.5, 0.0])
        assert unique

    def test_infeasible_row(self):
        with pytest.raises(InfeasibleRowError):
            solve_constrained_row(np.array([1.0, 2.0]), np.zeros(2), 1.0, 1e-12, 1e-8, row=3)


def test_cost_grid_orientation():
    c = cost_grid(np.array([0.0, 1.0]), np.array([0.0, 3.0]))
    assert c[1, 0] == 9.0 and c[0, 1] == 1.0


class TestPseudoStochastic:
    def test_recovers_planted_permutation(self, planted_pair):
        A, B, p = planted_pair
        result = solve_pseudo_stochastic(A, B)
        assert np.allclose(result.P, p.matrix(), atol=1e-8)
        assert np.allclose(result.P.sum(axis=1), 1.0)
        assert result.unique
        assert result.objective < 1e-14 * (1.0 + A.frobenius_norm ** 2)
        assert result.kkt_residual < 1e-6 * (1.0 + B.frobenius_norm ** 2)

    def test_symmetric_graph_gives_minimum_norm_average(self, two_edges):
        result = solve_pseudo_stochastic(two_edges, two_edges)
        assert np.allclose(result.P, np.full((4, 4), 0.25), atol=1e-10)
        assert not result.unique

    def test_matches_dense_least_squares(self, friendly6):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((6, 6))
        B = Graph(weights=friendly6.weights + 0.1 * (X + X.T))
        result = solve_pseudo_stochastic(friendly6, B)
        # independent solve: min ||P A - B P||^2 s.t. P 1 = 1, by a dense KKT system
        n = 6
        eye = np.eye(n)
        K = np.kron(eye, friendly6.weights.T) - np.kron(B.weights, eye)
        E = np.kron(eye, np.ones((1, n)))
        kkt = np.block([[2 * K.T @ K, E.T], [E, np.zeros((n, n))]])
        rhs = np.concatenate([np.zeros(n * n), np.ones(n)])
        expected = np.linalg.solve(kkt, rhs)[: n * n].reshape(n, n)
        assert np.allclose(result.P, expected, atol=1e-6)


class TestDoublyStochastic:
    def test_converges_to_planted_permutation(self, planted_pair):
        A, B, p = planted_pair
        result = solve_doubly_stochastic(A, B)
        assert result.converged
        assert np.allclose(result.P.sum(axis=0), 1.0) and np.allclose(result.P.sum(axis=1), 1.0)
        assert result.P.min() >= -1e-12
        assert project_to_permutation(result.P).perm == p

    def test_plain_frank_wolfe_stays_feasible(self, planted_pair):
        A, B, p = planted_pair
        assert SolverOptions().fw_away_steps is False
        result = solve_doubly_stochastic(A, B, SolverOptions(fw_max_iter=50))
        assert np.allclose(result.P.sum(axis=0), 1.0) and np.allclose(result.P.sum(axis=1), 1.0)
        assert result.iterations <= 50
        assert result.gap is not None

    def test_away_steps_on_request(self, planted_pair):
        A, B, p = planted_pair
        result = solve_doubly_stochastic(A, B, SolverOptions(fw_away_steps=True))
        assert result.converged
        assert np.allclose(result.P.sum(axis=0), 1.0) and np.allclose(result.P.sum(axis=1), 1.0)
        assert project_to_permutation(result.P).perm == p


class TestAffineBistochastic:
    def test_recovers_planted_permutation(self, planted_pair):
        A, B, p = planted_pair
        result = solve_affine_bistochastic(A, B)
        assert np.allclose(result.P, p.matrix(), atol=1e-8)
        assert result.unique
        assert result.constraint_kind == "affine_doubly"

    def test_size_limit(self, two_edges, monkeypatch):
        monkeypatch.setattr(settings, "affine_max_n", 3)
        with pytest.raises(InvalidInputError):
            solve_affine_bistochastic(two_edges, two_edges)


class TestSeeded:
    def seeds(self, A, p, vertices, mu=1.0):
        C = indicator_seeds(A.n, vertices)
        return SeedSet(C=C, D=p.matrix() @ C, mu=mu)

    @pytest.mark.parametrize("mu", [1e-3, 1.0, 1e3])
    def test_breaking_all_symmetries_recovers_planted_map(self, two_edges, mu):
        p = Permutation(mapping=(2, 0, 3, 1))
        B = apply_isomorphism(two_edges, p)
        result = solve_seeded(two_edges, B, self.seeds(two_edges, p, [0, 2], mu))
        assert result.unique and result.seeded
        assert np.allclose(result.P, p.matrix(), atol=1e-8)

    def test_vanishing_mu_approaches_unseeded_solution(self, planted_pair):
        A, B, p = planted_pair
        noisy = add_noise(B, 0.05, rng_seed=3)
        seeded = solve_seeded(A, noisy, self.seeds(A, p, [0, 1], mu=1e-9))
        assert np.linalg.norm(seeded.P - solve_pseudo_stochastic(A, noisy).P) < 1e-4

    def test_single_seed_leaves_a_free_direction(self, two_edges):
        p = Permutation.identity(4)
        result = solve_seeded(two_edges, two_edges, self.seeds(two_edges, p, [0]))
        assert not result.unique
        assert result.deficient_rows

    def test_dispatch(self, two_edges, planted_pair):
        A, B, _ = planted_pair
        assert solve(A, B, SolverOptions(constraint="affine")).constraint_kind == "affine_doubly"
        assert solve(A, B).constraint_kind == "pseudo_stochastic"
        seeds = self.seeds(two_edges, Permutation.identity(4), [0, 2])
        with pytest.raises(InvalidInputError):
            solve(two_edges, two_edges, SolverOptions(constraint="doubly"), seeds)


def test_options_from_pairs():
    opts = SolverOptions.from_pairs(["fw_max_iter=10", "constraint=doubly"], mu=2.0)
    assert opts.fw_max_iter == 10 and opts.constraint == "doubly" and opts.mu == 2.0
    with pytest.raises(InvalidInputError):
        SolverOptions.from_pairs(["fw_max_iter"])
