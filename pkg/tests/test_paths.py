import math

import numpy as np

from graphforge.core import Dag, UndirectedGraph, underlying_undirected
from graphforge.paths import (bridges, count_paths, count_paths_total, depth,
                              n_bottlenecks, width, width_at)

from conftest import chain_dag, full_dag
from oracles import brute_bridges, enumerate_paths, random_connected_graph, random_valid_dag


def test_chain_paths():
    for n in (3, 5, 10):
        ps = count_paths(chain_dag(n))
        assert ps.count == 1
        assert ps.min_len == ps.max_len == n - 1
        assert ps.std_len == 0.0
        assert ps.span == 1.0


def test_diamond_paths(diamond):
    ps = count_paths(diamond)
    assert ps.count == 2
    assert ps.min_len == ps.max_len == 2 and ps.mean_len == 2.0


def test_full_dag5_paths():
    ps = count_paths(full_dag(5))
    assert ps.count == 8
    # lengths by choosing a subset of the 3 interior nodes: C(3, k-1) paths of length k
    assert ps.mean_len == 2.5
    assert ps.min_len == 1 and ps.max_len == 4
    assert math.isclose(ps.log_count, math.log(8))


def test_exact_count_is_arbitrary_precision():
    ps = count_paths(full_dag(60))
    assert ps.count == 2 ** 58
    assert math.isclose(ps.log_count, 58 * math.log(2))


def test_count_paths_matches_dfs_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(3, 11))
        d = random_valid_dag(rng, n, float(rng.uniform(0.15, 0.8)))
        listed = enumerate_paths(d)
        ps = count_paths(d)
        assert ps.count == len(listed) == count_paths_total(d)
        lengths = [len(p) - 1 for p in listed]
        assert ps.min_len == min(lengths) and ps.max_len == max(lengths)
        assert math.isclose(ps.mean_len, float(np.mean(lengths)), abs_tol=1e-12)
        assert math.isclose(ps.std_len, float(np.std(lengths)), abs_tol=1e-12)


def test_depth_and_width_examples(diamond):
    chain = chain_dag(10)
    assert depth(chain) == 9 and width(chain) == 1
    for n in (5, 10):
        fd = full_dag(n)
        assert depth(fd) == n - 1 and width(fd) == n - 1
        assert width_at(fd, n - 1) == n - 1
    assert depth(diamond) == 2 and width(diamond) == 2
    assert width_at(diamond, 2) == 2


def test_depth_consistent_with_path_stats():
    rng = np.random.default_rng(5)
    for _ in range(50):
        d = random_valid_dag(rng, int(rng.integers(3, 12)))
        ps = count_paths(d)
        assert depth(d) == ps.max_len
        assert depth(d) >= ps.min_len
        assert 1 <= width(d) <= d.n - 1


def test_bridge_examples(diamond):
    assert n_bottlenecks(chain_dag(5)) == 4
    assert n_bottlenecks(diamond) == 0
    tailed = Dag(5, ((0, 1), (0, 2), (1, 3), (2, 3), (3, 4)))
    assert n_bottlenecks(tailed) == 1
    assert bridges(underlying_undirected(tailed)) == [(3, 4)]


def test_bridges_match_brute_force():
    rng = np.random.default_rng(23)
    for _ in range(120):
        n = int(rng.integers(3, 13))
        g = random_connected_graph(rng, n, float(rng.uniform(0.1, 0.6)))
        assert bridges(g) == sorted(brute_bridges(g))
    # disconnected graphs too: bridges are per-component
    g = UndirectedGraph(6, ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5)))
    assert bridges(g) == sorted(brute_bridges(g)) == [(3, 4), (4, 5)]
