import math

import numpy as np
import pytest

from graphforge.core import RngSpec, validate_dag
from graphforge.generators import (FmriParams, GenerationError, RdagParams,
                                   composite_objective, gen_ba, gen_composite,
                                   gen_er, gen_fmri, gen_rdag, gen_ws,
                                   load_fmri_matrix)
from conftest import make_fmri_matrix
from oracles import brute_grc, enumerate_paths, brute_clustering


def rng(label, seed=99):
    return RngSpec(seed, label)


# --- er ---

def test_er_complete_and_empty():
    assert gen_er(4, 1.0, rng("er")).num_edges == 6
    assert gen_er(60, 0.0, rng("er")).num_edges == 0


def test_er_rejects_bad_probability():
    with pytest.raises(GenerationError):
        gen_er(10, 1.5, rng("er"))


def test_er_edge_count_within_4_sigma():
    # binomial: mean 0.2*1770 = 354, sigma = sqrt(1770*0.2*0.8) ~ 16.8
    counts = [gen_er(60, 0.2, rng("er", s)).num_edges for s in range(30)]
    assert all(abs(c - 354.0) < 4 * 16.83 for c in counts)


# --- ba ---

def test_ba_tree_for_m1():
    g = gen_ba(5, 1, rng("ba"))
    assert g.num_edges == 4
    from graphforge.layout import largest_component
    assert largest_component(g).n == 5  # connected


def test_ba_edge_count():
    assert gen_ba(60, 2, rng("ba")).num_edges == 2 * 58
    assert gen_ba(30, 5, rng("ba")).num_edges == 5 * 25


def test_ba_rejects_bad_m():
    with pytest.raises(GenerationError):
        gen_ba(5, 5, rng("ba"))
    with pytest.raises(GenerationError):
        gen_ba(5, 0, rng("ba"))


def test_ba_grows_hubs():
    for s in range(50):
        deg = gen_ba(60, 2, rng("ba", s)).degrees()
        assert deg.max() >= deg.mean()


# --- ws ---

def test_ws_no_rewiring_is_ring():
    g = gen_ws(30, 2, 0.0, rng("ws"))
    assert g.num_edges == 30
    assert set(g.degrees().tolist()) == {2}
    g4 = gen_ws(30, 4, 0.0, rng("ws"))
    assert g4.num_edges == 60
    assert set(g4.degrees().tolist()) == {4}


def test_ws_edge_count_preserved_for_all_p():
    for p in (0.0, 0.25, 0.5, 1.0):
        for s in range(5):
            assert gen_ws(30, 2, p, rng("ws", s)).num_edges == 30
            assert gen_ws(24, 6, p, rng("ws", s)).num_edges == 72


def test_ws_rejects_odd_k_and_bad_p():
    with pytest.raises(GenerationError):
        gen_ws(10, 3, 0.1, rng("ws"))
    with pytest.raises(GenerationError):
        gen_ws(10, 2, -0.1, rng("ws"))


# --- rdag ---

def test_rdag_constant_one_is_chain():
    d = gen_rdag(RdagParams(3, 1), rng("rdag"))
    assert d.edges == ((0, 1), (1, 2))


def test_rdag_weight_formula():
    # target with quota 4, bucket floor(3/5)=0 under exp3: w = 4^0.5 * e^0 = 2
    params = RdagParams(10, 4, "exp3", 5, 0.5)
    f = params.weight_fn()
    w = 4 ** params.alpha * f((3 - 0) // params.b)
    assert w == 2.0
    assert f(1) == pytest.approx(math.exp(-3.0))


def test_rdag_saturated_quota_gives_full_dag():
    d = gen_rdag(RdagParams(6, 99), rng("rdag"))
    assert d.out_degrees().tolist() == [5, 4, 3, 2, 1, 0]


def test_rdag_degree_invariants():
    for s in range(10):
        params = RdagParams(20, 3, "exp2", 5, 0.5)
        d = gen_rdag(params, rng("rdag", s))
        out = d.out_degrees()
        for i in range(19):
            assert out[i] == min(3, 19 - i)
        assert (d.in_degrees()[1:] >= 1).all()
        assert validate_dag(d).ok


def test_rdag_forced_edge_quota_flag():
    # with the flag off, the forced chain edge no longer consumes quota, so
    # nodes can exceed their nominal out-degree by one
    quota_off = RdagParams(12, 1, "one", 5, 0.0, forced_edge_counts=False)
    d = gen_rdag(quota_off, rng("rdag"))
    assert d.out_degrees()[:-1].max() >= 2


def test_rdag_exp_is_more_local_than_flat():
    # fraction of edges in the nearest bucket, averaged over 20 seeds
    def local_fraction(f_tag):
        fracs = []
        for s in range(20):
            d = gen_rdag(RdagParams(60, 3, f_tag, 5, 0.5), rng("rdag", s))
            buckets = [(j - i) // 5 for i, j in d.edges]
            fracs.append(sum(1 for b in buckets if b == 0) / len(buckets))
        return float(np.mean(fracs))

    assert local_fraction("exp3") > local_fraction("one")


def test_rdag_out_degree_presets():
    g = RngSpec(4, "rdag").generator()
    from graphforge.generators import resolve_out_degrees
    lap = resolve_out_degrees(RdagParams(200, "laplace"), g)
    assert lap.min() >= 1 and 2.0 < lap.mean() < 5.0
    hub = resolve_out_degrees(RdagParams(30, "hub"), g)
    assert sorted(hub)[-2:] == [10, 10] and sorted(set(hub)) == [2, 10]
    explicit = resolve_out_degrees(RdagParams(4, (1, 2, 1, 1)), g)
    assert explicit.tolist() == [1, 2, 1, 1]


# --- composite ---

def test_composite_objective_on_diamond(diamond):
    # brute-force each term: path counter, reachability-based grc, clustering
    from graphforge.core import underlying_undirected
    n_paths = len(enumerate_paths(diamond))
    assert n_paths == 2
    expected = (math.sqrt(math.log(n_paths) / diamond.n)
                - 2 * brute_grc(diamond)
                - brute_clustering(underlying_undirected(diamond)))
    assert composite_objective(diamond) == pytest.approx(expected, abs=1e-12)
    assert composite_objective(diamond) == pytest.approx(math.sqrt(math.log(2) / 4) - 14.0 / 9.0)


def test_composite_zero_budget_returns_initial():
    a = gen_composite(12, 0.9, 0, rng("comp"))
    b = gen_composite(12, 0.9, 0, rng("comp"))
    assert a == b
    assert validate_dag(a).ok


def test_composite_trace_non_decreasing_and_improving():
    trace: list[float] = []
    d = gen_composite(14, 0.85, 150, rng("comp"), trace=trace)
    assert all(b > a for a, b in zip(trace, trace[1:]))
    assert composite_objective(d) == pytest.approx(trace[-1])
    assert trace[-1] >= trace[0]
    assert validate_dag(d).ok


# --- fmri ---

def test_fmri_single_edge_case():
    m = np.array([[0.0, 2.5], [2.5, 0.0]])
    g = gen_fmri(FmriParams(m, 2.0, 2), rng("fmri"))
    assert g.n == 2 and g.edges == ((0, 1),)


def test_fmri_everything_below_threshold_is_an_error():
    m = np.array([[0.0, 2.5], [2.5, 0.0]])
    with pytest.raises(GenerationError):
        gen_fmri(FmriParams(m, 3.0, 2), rng("fmri"))


def test_fmri_subsamples_to_target_and_stays_connected(tmp_path):
    m = make_fmri_matrix(100, seed=1)
    thr = 3.0
    params = FmriParams(m, thr, 60)
    g = gen_fmri(params, rng("fmri"))
    assert g.n == 60
    from graphforge.layout import largest_component
    assert largest_component(g).n == 60  # connected
    # matrix loading round-trip
    path = tmp_path / "m.csv"
    np.savetxt(path, m, delimiter=",")
    m2 = load_fmri_matrix(path)
    g2 = gen_fmri(FmriParams(m2, thr, 60), rng("fmri"))
    assert g2 == g


def test_fmri_component_smaller_than_target_is_returned_whole():
    m = np.zeros((10, 10))
    m[0, 1] = m[1, 0] = 5.0
    m[1, 2] = m[2, 1] = 5.0
    g = gen_fmri(FmriParams(m, 4.0, 8), rng("fmri"))
    assert g.n == 3 and g.num_edges == 2


def test_fmri_params_symmetrize_and_validate():
    m = np.array([[1.0, 3.0], [0.0, 2.0]])
    p = FmriParams(m, 1.0, 2)
    assert p.matrix[0, 0] == 0.0 and p.matrix[0, 1] == p.matrix[1, 0] == 1.5
    with pytest.raises(GenerationError):
        FmriParams(np.zeros((2, 3)), 1.0, 2)
    with pytest.raises(GenerationError):
        FmriParams(np.zeros((4, 4)), -1.0, 2)
    with pytest.raises(GenerationError):
        FmriParams(np.zeros((4, 4)), 1.0, 5)


# --- cross-cutting determinism ---

def test_generators_are_deterministic():
    pairs = [
        lambda s: gen_er(40, 0.3, s),
        lambda s: gen_ba(40, 3, s),
        lambda s: gen_ws(40, 4, 0.3, s),
        lambda s: gen_rdag(RdagParams(40, "laplace", "exp2", 10, 0.5), s),
        lambda s: gen_composite(10, 0.9, 30, s),
        lambda s: gen_fmri(FmriParams(make_fmri_matrix(50, 3), 3.0, 30), s),
    ]
    for make in pairs:
        assert make(rng("det")) == make(rng("det"))
        assert make(rng("det")) != make(rng("det", seed=100))
