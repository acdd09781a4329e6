import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from graphforge.core import Dag, UndirectedGraph


@pytest.fixture
def diamond() -> Dag:
    return Dag(4, ((0, 1), (0, 2), (1, 3), (2, 3)), (0, 1, 1, 2))


@pytest.fixture
def chain10() -> Dag:
    return Dag(10, tuple((i, i + 1) for i in range(9)))


def full_dag(n: int) -> Dag:
    return Dag(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def chain_dag(n: int) -> Dag:
    return Dag(n, tuple((i, i + 1) for i in range(n - 1)))


def path_graph(n: int) -> UndirectedGraph:
    return UndirectedGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> UndirectedGraph:
    return UndirectedGraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def ladder_dag(rungs: int = 10) -> Dag:
    """Two parallel chains of `rungs` rungs, cross-connected at every rung.

    Node 2k is the left rail, 2k+1 the right rail; index order makes it a
    DAG with single input/output after closing the ends.
    """
    n = 2 * rungs
    edges = set()
    for k in range(rungs - 1):
        edges.add((2 * k, 2 * k + 2))
        edges.add((2 * k + 1, 2 * k + 3))
    for k in range(rungs):
        edges.add((2 * k, 2 * k + 1))
    edges.add((0, 1))
    edges.add((n - 2, n - 1))
    return Dag(n, tuple(edges))


def make_fmri_matrix(dim: int, seed: int = 0, scale: float = 3.0) -> np.ndarray:
    """Deterministic synthetic z-scored partial-correlation stand-in."""
    rng = np.random.default_rng(seed)
    m = rng.normal(0.0, scale, size=(dim, dim))
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 0.0)
    return m
