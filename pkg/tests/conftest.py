import itertools
from typing import Tuple

import numpy as np
import pytest

from relaxmatch.schemas.graph import Graph, Permutation
from relaxmatch.services.generators import random_friendly_graph, random_permutation
from relaxmatch.services.graph_core import apply_isomorphism

FRUCHT_LCF = [-5, -2, -4, 2, 5, -2, 2, 5, -2, -5, 4, 2]


def adjacency(n, edges):
    W = np.zeros((n, n))
    for i, j in edges:
        W[i, j] = W[j, i] = 1.0
    return Graph(weights=W)


def brute_force_distortion(A: Graph, B: Graph) -> Tuple[float, Tuple[int, ...]]:
    """itertools minimum of sum (A[p_i, p_j] - B[i, j])^2, independent of the library oracle."""
    n = A.n
    best = (np.inf, None)
    for mapping in itertools.permutations(range(n)):
        idx = list(mapping)
        value = float(np.sqrt(np.sum((A.weights[np.ix_(idx, idx)] - B.weights) ** 2)))
        if value < best[0]:
            best = (value, mapping)
    return best


@pytest.fixture
def path3():
    return adjacency(3, [(0, 1), (1, 2)])


@pytest.fixture
def two_edges():
    return adjacency(4, [(0, 1), (2, 3)])


@pytest.fixture
def triangle():
    return adjacency(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def frucht():
    n = len(FRUCHT_LCF)
    edges = [(i, (i + 1) % n) for i in range(n)] + [(i, (i + shift) % n) for i, shift in enumerate(FRUCHT_LCF)]
    return adjacency(n, edges)


@pytest.fixture
def friendly6():
    return random_friendly_graph(6, rng_seed=11).graph


@pytest.fixture
def planted_pair(friendly6):
    p = random_permutation(6, rng_seed=5)
    return friendly6, apply_isomorphism(friendly6, p), p


@pytest.fixture
def swap_edge() -> Permutation:
    return Permutation(mapping=(2, 3, 0, 1))
