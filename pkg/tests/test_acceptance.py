"""Acceptance gate: one test per shipped guarantee, one PASS line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  The batch-scale check runs the full 1020-entry grid and is the
long pole (~10-15 min on one core).
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from graphforge.batch import run_batch
from graphforge.core import RngSpec, underlying_undirected
from graphforge.features import (Q1D_ELONGATION_CUTOFF, pca_elongation, q1d)
from graphforge.generators import RdagParams, gen_er, gen_rdag, gen_ws
from graphforge.layout import (Embedding, dagify_embedded, kamada_kawai, largest_component,
                               order_nodes, orient_edges, orphan_count)
from graphforge.paths import bridges, count_paths, depth, n_bottlenecks, width
from graphforge.presets import BatchManifest, build_manifest
from graphforge.arch import assign_stages

from conftest import chain_dag, full_dag, make_fmri_matrix
from oracles import (brute_betweenness_mean, brute_bridges, brute_clustering,
                     brute_closeness_mean, brute_closeness_output,
                     brute_global_efficiency, brute_local_efficiency,
                     brute_transitivity, brute_triad_census, enumerate_paths,
                     random_connected_graph, random_valid_dag)


def report(name: str, detail: str) -> None:
    print(f"[PASS] {name}: {detail}")


def test_orphan_ordering_statistic():
    """x-KK ordering produces far fewer orphans than a random ordering."""
    started = time.time()
    rng = np.random.default_rng(20_240_501)
    x_counts = []
    random_counts = []
    for seed in range(50):
        g = largest_component(gen_er(60, 0.2, RngSpec(seed, "orphan-stat")))
        emb = kamada_kawai(g)
        x_counts.append(orphan_count(orient_edges(g, order_nodes(emb, "x"))))
        perm = rng.permutation(g.n)
        random_counts.append(orphan_count(orient_edges(g, perm)))
    mean_x = float(np.mean(x_counts))
    mean_rand = float(np.mean(random_counts))
    elapsed = time.time() - started
    assert mean_x <= mean_rand / 1.5, (mean_x, mean_rand)
    assert elapsed < 120.0
    report("orphan-ordering", f"x-KK {mean_x:.2f} vs random {mean_rand:.2f} orphans "
                              f"(ratio {mean_rand / mean_x:.2f}x, {elapsed:.0f}s)")


def test_oracle_equivalence():
    """Exact and 1e-9 agreement with brute-force oracles."""
    started = time.time()
    rng = np.random.default_rng(7_531)

    for _ in range(200):  # path census, exact
        d = random_valid_dag(rng, int(rng.integers(3, 11)), float(rng.uniform(0.15, 0.8)))
        listed = enumerate_paths(d)
        ps = count_paths(d)
        assert ps.count == len(listed)
        lengths = [len(p) - 1 for p in listed]
        assert (ps.min_len, ps.max_len) == (min(lengths), max(lengths))
        assert math.isclose(ps.mean_len, float(np.mean(lengths)), abs_tol=1e-12)

    for _ in range(60):  # bridges, exact
        g = random_connected_graph(rng, int(rng.integers(3, 13)), float(rng.uniform(0.1, 0.6)))
        assert bridges(g) == sorted(brute_bridges(g))

    from graphforge.features import compute_features
    for _ in range(20):  # real-valued centralities at 1e-9, census exact
        d = assign_stages(random_valid_dag(rng, int(rng.integers(4, 9)),
                                           float(rng.uniform(0.2, 0.7))))
        und = underlying_undirected(d)
        fv = compute_features(d, kamada_kawai(und)).values
        assert abs(fv["betweenness_mean"] - brute_betweenness_mean(d)) < 1e-9
        assert abs(fv["closeness_output"] - brute_closeness_output(d)) < 1e-9
        assert abs(fv["closeness_mean"] - brute_closeness_mean(d)) < 1e-9
        assert abs(fv["average_clustering"] - brute_clustering(und)) < 1e-9
        assert abs(fv["transitivity"] - brute_transitivity(und)) < 1e-9
        assert abs(fv["global_efficiency"] - brute_global_efficiency(und)) < 1e-9
        assert abs(fv["local_efficiency"] - brute_local_efficiency(und)) < 1e-9
        census = brute_triad_census(d)
        assert fv["triads_021d"] == census["021D"] and fv["triads_021u"] == census["021U"]
        assert fv["triads_021c"] == census["021C"] and fv["triads_030t"] == census["030T"]

    elapsed = time.time() - started
    assert elapsed < 300.0
    report("oracle-equivalence",
           f"paths x200, bridges x60, centralities+census x20 ({elapsed:.0f}s)")


def test_q1d_generator_statistic():
    """Short-range rdags are mostly Q1D; ws(k=2) graphs never are."""
    started = time.time()
    configs = [(f, n_out, b) for f in ("exp2", "exp3") for n_out in (2, 3, 4, 5)
               for b in (5, 10)]
    rdag_flags = []
    for seed in range(3):
        for f, n_out, b in configs:
            if len(rdag_flags) == 40:
                break
            d = gen_rdag(RdagParams(60, n_out, f, b, 0.5), RngSpec(seed, "q1d-stat"))
            rdag_flags.append(q1d(d, kamada_kawai(underlying_undirected(d))).is_q1d)
    assert len(rdag_flags) == 40
    rdag_rate = sum(rdag_flags) / len(rdag_flags)

    ws_flags = []
    ps = (0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75, 0.8)
    for seed in range(4):
        for p in ps:
            g = largest_component(gen_ws(60, 2, p, RngSpec(seed, "q1d-stat")))
            d, emb = dagify_embedded(g, "x")
            ws_flags.append(q1d(d, emb).is_q1d)
    assert len(ws_flags) == 40
    ws_rate = sum(ws_flags) / len(ws_flags)

    elapsed = time.time() - started
    assert rdag_rate >= 0.5, rdag_rate
    assert ws_rate == 0.0, ws_rate
    report("q1d-generator-statistic",
           f"rdag {rdag_rate:.0%} Q1D (>=50%), ws(k=2) {ws_rate:.0%} ({elapsed:.0f}s)")


def test_analytic_brackets():
    """Closed-form path/depth/width/bottleneck values, zero tolerance."""
    for n in (5, 10, 30):
        fd = full_dag(n)
        ps = count_paths(fd)
        assert ps.count == 2 ** (n - 2)
        assert depth(fd) == n - 1
        assert width(fd) == n - 1
        ch = chain_dag(n)
        assert count_paths(ch).count == 1
        assert width(ch) == 1
        assert n_bottlenecks(ch) == n - 1
    report("analytic-brackets", "full DAG and chain values exact for n in {5,10,30}")


def test_elongation_unit_behavior():
    """Collinear layouts score 1, squares 0, and the cutoff is exactly 0.25."""
    collinear = Embedding(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [5.0, 5.0]]), 0.0)
    assert pca_elongation(collinear) == pytest.approx(1.0, abs=1e-9)
    square = Embedding(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), 0.0)
    assert pca_elongation(square) == pytest.approx(0.0, abs=1e-9)
    assert Q1D_ELONGATION_CUTOFF == 0.25
    report("elongation-units", "collinear=1, square=0 (1e-9), cutoff=0.25")


def _tree_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_batch_determinism(tmp_path):
    """Identical bytes across re-runs and across worker counts."""
    manifest = build_manifest("smoke", 2_024)
    fmri = {30: make_fmri_matrix(50, seed=8), 60: make_fmri_matrix(100, seed=9)}
    extra = tuple(
        manifest.entries[0].__class__(f"fmri_n{n}_t3_v0", "fmri", {"n": n, "t": 3.0}, 1_000 + n)
        for n in (30, 60)
    )
    manifest = BatchManifest("determinism", 2_024, 10, manifest.entries + extra)
    runs = {}
    for label, threads in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / label
        summary = run_batch(manifest, str(out), fmri_matrices=fmri, threads=threads)
        assert summary.ok, summary.failures
        runs[label] = _tree_bytes(out)
    assert runs["a"] == runs["b"], "re-run produced different bytes"
    assert runs["a"] == runs["c"], "worker count changed output bytes"
    report("batch-determinism",
           f"{len(runs['a'])} files byte-identical across reruns and 1 vs 2 workers")


def test_batch_scale_full_grid(tmp_path):
    """The whole 1020-entry grid generates and analyzes in under 30 minutes."""
    manifest = build_manifest("paper-cifar10", 1_234)
    assert len(manifest.entries) == 1020
    fmri = {30: make_fmri_matrix(50, seed=18), 60: make_fmri_matrix(100, seed=19)}
    started = time.time()
    summary = run_batch(manifest, str(tmp_path), fmri_matrices=fmri, threads=None)
    elapsed = time.time() - started
    assert summary.total == 1020
    assert summary.ok, summary.failures[:5]
    graphs = list((tmp_path / "graphs").glob("*.json"))
    specs = list((tmp_path / "specs").glob("*.json"))
    features = (tmp_path / "features.csv").read_text().splitlines()
    assert len(graphs) == 1020 and len(specs) == 1020
    assert len(features) == 1021  # header + one row per graph
    assert elapsed < 1800.0
    report("batch-scale", f"1020 graphs + features + specs in {elapsed:.0f}s")
