"""Random instances: friendly graphs, graphs with designed symmetry groups, noise."""
import itertools
import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from relaxmatch.config import settings
from relaxmatch.schemas.graph import Graph, Permutation, PermutationSet
from relaxmatch.services.oracle import enumerate_symmetries
from relaxmatch.services.spectral import analyze
from relaxmatch.utils.errors import DomainError, InfeasibleInstanceError, ResampleLimitError

logger = logging.getLogger(__name__)


class FriendlyInstance(NamedTuple):
    graph: Graph
    epsilon: float
    delta: float


def _rng(rng_seed) -> np.random.Generator:
    return np.random.default_rng(rng_seed)


def random_symmetric_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    X = rng.standard_normal((n, n))
    return (X + X.T) / 2.0


def random_permutation(n: int, rng_seed=None) -> Permutation:
    return Permutation(mapping=tuple(int(x) for x in _rng(rng_seed).permutation(n)))


def random_friendly_graph(n: int, rng_seed=None, resample_cap: Optional[int] = None) -> FriendlyInstance:
    if n < 2:
        raise DomainError(f"random friendly graphs need n >= 2, got {n}")
    rng = _rng(rng_seed)
    cap = settings.friendly_resample_cap if resample_cap is None else resample_cap
    for attempt in range(cap):
        graph = Graph(weights=random_symmetric_matrix(n, rng))
        report = analyze(graph)
        if report.is_friendly:
            if attempt:
                logger.info(f"friendly graph found after {attempt + 1} draws")
            return FriendlyInstance(graph, report.epsilon, report.delta)
    raise ResampleLimitError(f"no friendly graph of order {n} in {cap} draws")


def graph_from_spectrum(lambdas: Sequence[float], rng_seed=None) -> FriendlyInstance:
    """Graph with the given simple spectrum and every eigenvector overlap u_i^T 1 equal to 1.

    Such graphs are as friendly as possible (epsilon = 1), which makes them
    convenient when the recovery bound must be large.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    n = len(lambdas)
    if n < 2 or np.any(np.diff(np.sort(lambdas)) <= 0):
        raise DomainError("graph_from_spectrum needs at least two distinct eigenvalues")
    rng = _rng(rng_seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    a = Q.sum(axis=0)
    w = a - np.ones(n)
    if float(w @ w) > 0:
        Q = Q @ (np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w))
    W = (Q * lambdas) @ Q.T
    graph = Graph(weights=(W + W.T) / 2.0)
    report = analyze(graph)
    return FriendlyInstance(graph, report.epsilon, report.delta)


def add_noise(B: Graph, rho: float, rng_seed=None) -> Graph:
    """B + rho R with R symmetric Gaussian scaled to ||R||_F = 1."""
    if rho < 0 or not math.isfinite(rho):
        raise DomainError(f"noise level must be finite and non-negative, got {rho}")
    if rho == 0:
        return B
    R = random_symmetric_matrix(B.n, _rng(rng_seed))
    R /= np.linalg.norm(R)
    return Graph(weights=B.weights + rho * R)


def _prime_factors(m: int) -> List[int]:
    factors = []
    p = 2
    while p * p <= m:
        while m % p == 0:
            factors.append(p)
            m //= p
        p += 1
    if m > 1:
        factors.append(m)
    return factors


def _design_generators(n: int, l: int) -> List[Permutation]:
    """One twin swap per factor 2 of l+1 and a rotation of two p-orbits per odd prime p."""
    generators = []
    start = 0
    for p in _prime_factors(l + 1):
        width = 2 if p == 2 else 2 * p
        if start + width > n:
            raise InfeasibleInstanceError(
                f"cannot build a graph with {l} non-trivial symmetries on {n} vertices"
            )
        mapping = list(range(n))
        if p == 2:
            mapping[start], mapping[start + 1] = start + 1, start
        else:
            for orbit in (start, start + p):
                for k in range(p):
                    mapping[orbit + k] = orbit + (k + 1) % p
        generators.append(Permutation(mapping=mapping))
        start += width
    return generators


def _generated_group(n: int, generators: List[Permutation]) -> PermutationSet:
    """All products of powers of commuting generators with disjoint supports."""
    cycles = []
    for g in generators:
        powers = [Permutation.identity(n)]
        current = g
        while not current.is_identity():
            powers.append(current)
            current = current.compose(g)
        cycles.append(powers)
    elements = []
    for combo in itertools.product(*cycles):
        element = Permutation.identity(n)
        for factor in combo:
            element = element.compose(factor)
        elements.append(element)
    return PermutationSet(elements=elements, kind="symmetries")


def random_symmetric_instance(
    n: int, l: int, rng_seed=None, resample_cap: Optional[int] = None
) -> Tuple[Graph, PermutationSet]:
    """Graph whose symmetry group has exactly l non-trivial elements.

    A random symmetric matrix is averaged over a designed group; at oracle
    scale the group is re-derived by exhaustive search and the draw repeated
    if extra symmetries appeared.
    """
    if l < 0:
        raise DomainError(f"number of symmetries must be non-negative, got {l}")
    if l == 0:
        instance = random_friendly_graph(n, rng_seed)
        return instance.graph, PermutationSet(elements=[Permutation.identity(n)], kind="symmetries")
    group = _generated_group(n, _design_generators(n, l))
    rng = _rng(rng_seed)
    cap = settings.symmetric_resample_cap if resample_cap is None else resample_cap
    for attempt in range(cap):
        X = random_symmetric_matrix(n, rng)
        W = np.zeros((n, n))
        for g in group.elements:
            index = g.array
            W += X[np.ix_(index, index)]
        W /= len(group)
        graph = Graph(weights=(W + W.T) / 2.0)
        if n > settings.oracle_limit:
            return graph, group
        found = enumerate_symmetries(graph)
        if len(found) == l + 1 and all(g in found for g in group.elements):
            return graph, found
        logger.warning(f"draw {attempt + 1} has {len(found) - 1} non-trivial symmetries instead of {l}, resampling")
    raise ResampleLimitError(f"no graph with exactly {l} non-trivial symmetries on {n} vertices in {cap} draws")
