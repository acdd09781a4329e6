"""The 54-feature graph vector plus the novel wiring characteristics.

Per-feature directed/undirected conventions (the ones the paper leaves to
the computing library) are fixed here and documented feature by feature:
degree-type, stage-fraction and distance features use the underlying
undirected graph unless a feature is inherently directional (triad census,
reaching centrality, page rank, input/output closeness, edge connectivity,
path statistics).  Degeneracies surface as NaN entries with a reason in
``FeatureVector.notes`` instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .connectivity import average_node_connectivity, st_edge_connectivity
from .core import Dag, InvalidGraphError, UndirectedGraph, underlying_undirected
from .layout import Embedding, kamada_kawai
from .paths import count_paths, depth, n_bottlenecks, width

# Raw feature columns in fixed export order, with the power applied after
# min-max scaling (1.0 means no transform).
FEATURE_POWERS: dict[str, float] = {
    "degree_assortativity": 1.0,
    "max_degree": 0.5,
    "mean_in_degree": 0.25,
    "mean_out_degree": 0.5,
    "min_degree": 0.25,
    "outer_edges": 1.0,
    "num_nodes": 1.0,
    "num_edges": 0.5,
    "reduce_frac": 1.0,
    "edges_per_node": 0.5,
    "density": 0.5,
    "transitivity": 0.5,
    "average_clustering": 0.5,
    "average_node_connectivity": 0.25,
    "average_shortest_path_length": 0.25,
    "s_metric_norm": 0.5,
    "global_reaching_centrality": 0.5,
    "edge_connectivity": 0.25,
    "modularity_trace": 0.5,
    "intrastage": 1.0,
    "interstage": 1.0,
    "hops_per_node": 0.25,
    "mean_degree": 0.25,
    "std_degree": 0.5,
    "span_degree": 0.25,
    "triads_021d": 0.5,
    "triads_021u": 0.5,
    "triads_021c": 0.5,
    "triads_030t": 0.25,
    "log_paths": 0.5,
    "mean_path": 0.5,
    "std_paths": 1.0,
    "min_path": 0.25,
    "max_path": 0.5,
    "span_path": 0.25,
    "closeness_output": 0.5,
    "closeness_mean": 0.5,
    "betweenness_mean": 0.25,
    "current_flow_closeness_mean": 1.0,
    "current_flow_betweenness_mean": 0.25,
    "second_order_mean": 0.5,
    "communicability_betweenness_mean": 0.5,
    "communicability_start_mean": 0.5,
    "communicability_end_mean": 0.5,
    "radius": 0.5,
    "diameter": 0.25,
    "local_efficiency": 0.5,
    "global_efficiency": 1.0,
    "efficiency_io": 0.5,
    "page_rank_output": 1.0,
    "constraint_mean": 0.5,
    "effective_size_mean": 0.5,
    "closeness_vitality_mean": 1.0,
    "wiener_index_norm": 0.5,
}

FEATURE_COLUMNS: tuple[str, ...] = tuple(FEATURE_POWERS)

EXTRA_COLUMNS: tuple[str, ...] = (
    "pca_elongation", "n_bottlenecks", "depth", "width", "is_q1d",
)

Q1D_ELONGATION_CUTOFF = 0.25


@dataclass(frozen=True)
class FeatureVector:
    """Named map with exactly the 54 raw features (NaN reasons in notes)."""

    values: Mapping[str, float]
    notes: Mapping[str, str]

    def __post_init__(self):
        if tuple(self.values) != FEATURE_COLUMNS:
            raise ValueError("feature vector must carry exactly the 54 known columns in order")

    def as_array(self) -> np.ndarray:
        return np.array([self.values[c] for c in FEATURE_COLUMNS], dtype=np.float64)


@dataclass(frozen=True)
class Q1dVerdict:
    """Quasi-1-dimensional classification of a wiring."""

    pca_elongation: float
    n_bottlenecks: int
    is_q1d: bool


def pca_elongation(e: Embedding) -> float:
    """2 * (top-eigenvalue variance share - 0.5) of the 2x2 coordinate covariance.

    0 for isotropic layouts, 1 for collinear ones; invariant under
    rotation, translation and uniform scaling.
    """
    x = np.asarray(e.coords, dtype=np.float64)
    x = x - x.mean(axis=0)
    cov = x.T @ x
    total = float(np.trace(cov))
    if total <= 0.0:
        raise ValueError("all embedding points coincide; elongation undefined")
    vals = np.linalg.eigvalsh(cov)
    ratio = float(vals[-1]) / total
    return min(max(2.0 * (ratio - 0.5), 0.0), 1.0)


def q1d(d: Dag, e: Embedding) -> Q1dVerdict:
    """Quasi-1d verdict: elongation above 0.25 and zero bottleneck edges."""
    elong = pca_elongation(e)
    nb = n_bottlenecks(d)
    return Q1dVerdict(elong, nb, elong > Q1D_ELONGATION_CUTOFF and nb == 0)


# ---------------------------------------------------------------------------
# shared fast primitives (also used by the composite generator objective)
# ---------------------------------------------------------------------------

def _reach_bitsets(d: Dag) -> list[int]:
    reach = [0] * d.n
    succ = d.successors()
    for i in range(d.n - 1, -1, -1):
        r = 0
        for j in succ[i]:
            r |= (1 << j) | reach[j]
        reach[i] = r
    return reach


def global_reaching_centrality(d: Dag) -> float:
    """Mean surplus of the maximum local reaching centrality (directed).

    Local reaching centrality of node i is the fraction of the other
    nodes reachable from i.
    """
    n = d.n
    lrc = [bin(r).count("1") / (n - 1) for r in _reach_bitsets(d)]
    top = max(lrc)
    return sum(top - v for v in lrc) / (n - 1)


def average_clustering(g: UndirectedGraph) -> float:
    """Mean local clustering coefficient (nodes of degree < 2 contribute 0)."""
    adj = [0] * g.n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    total = 0.0
    for v in range(g.n):
        nb = adj[v]
        k = bin(nb).count("1")
        if k < 2:
            continue
        links = 0
        m = nb
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            links += bin(adj[u] & nb).count("1")
        total += links / (k * (k - 1))  # double-counted neighbor pairs
    return total / g.n


def average_clustering_underlying(d: Dag) -> float:
    return average_clustering(underlying_undirected(d))


def _distance_matrix(n: int, edges, directed: bool) -> np.ndarray:
    if not edges:
        out = np.full((n, n), np.inf)
        np.fill_diagonal(out, 0.0)
        return out
    rows = [u for u, _ in edges]
    cols = [v for _, v in edges]
    if not directed:
        rows, cols = rows + cols, cols + rows
    a = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return shortest_path(a, method="D", directed=directed, unweighted=True)


def _wiener_sum(dist: np.ndarray) -> float:
    finite = np.where(np.isfinite(dist), dist, 0.0)
    return float(finite.sum()) / 2.0


# ---------------------------------------------------------------------------
# the 54-feature vector
# ---------------------------------------------------------------------------

def compute_features(d: Dag, e: Embedding) -> FeatureVector:
    """Populate all 54 raw features for a staged DAG and its embedding.

    Directed features are computed on the DAG, undirected-only ones on the
    underlying undirected graph; spectral features use dense linear
    algebra and are intended for n <= 256.
    """
    if d.stages is None:
        raise InvalidGraphError("features need a DAG with assigned stages")
    n = d.n
    m = d.num_edges
    und = underlying_undirected(d)
    deg = und.degrees().astype(np.float64)
    adj = und.adjacency().astype(np.float64)
    dist_u = _distance_matrix(n, und.edges, directed=False)
    dist_d = _distance_matrix(n, d.edges, directed=True)
    stages = np.array(d.stages)
    ps = count_paths(d)

    nxd = nx.DiGraph()
    nxd.add_nodes_from(range(n))
    nxd.add_edges_from(d.edges)
    nxu = nx.Graph()
    nxu.add_nodes_from(range(n))
    nxu.add_edges_from(und.edges)

    values: dict[str, float] = {}
    notes: dict[str, str] = {}

    def put(name: str, val: float, note: str | None = None) -> None:
        values[name] = float(val)
        if note is not None:
            notes[name] = note

    # --- degrees and counts ---
    ex = np.concatenate([deg[[u for u, _ in und.edges]], deg[[v for _, v in und.edges]]])
    ey = np.concatenate([deg[[v for _, v in und.edges]], deg[[u for u, _ in und.edges]]])
    if ex.std() == 0:
        put("degree_assortativity", math.nan, "assortativity undefined for degree-regular graphs")
    else:
        put("degree_assortativity", float(np.corrcoef(ex, ey)[0, 1]))
    put("max_degree", deg.max())
    put("mean_in_degree", m / n)
    put("mean_out_degree", m / n)
    put("min_degree", deg.min())

    delta = np.array([abs(stages[v] - stages[u]) for u, v in d.edges])
    crossing = int((delta > 0).sum())
    put("outer_edges", crossing / m)
    put("num_nodes", n)
    put("num_edges", m)
    put("reduce_frac", crossing / n)
    put("edges_per_node", m / n)
    put("density", m / (n * (n - 1)))  # directed convention

    a3_diag = np.einsum("ij,jk,ki->i", adj, adj, adj)
    triads = float((deg * (deg - 1)).sum())
    if triads == 0:
        put("transitivity", math.nan, "no connected triples")
    else:
        put("transitivity", a3_diag.sum() / triads)
    put("average_clustering", average_clustering(und))
    put("average_node_connectivity", average_node_connectivity(und))
    put("average_shortest_path_length", float(dist_u[~np.eye(n, dtype=bool)].mean()))
    put("s_metric_norm", float(sum(deg[u] * deg[v] for u, v in und.edges)) / m)
    put("global_reaching_centrality", global_reaching_centrality(d))
    put("edge_connectivity", st_edge_connectivity(d))
    mod = adj - np.outer(deg, deg) / (2.0 * m)
    put("modularity_trace", float(np.linalg.eigvalsh(mod).sum()))

    put("intrastage", float((delta == 0).sum()) / m)
    put("interstage", float((delta == 1).sum()) / m)
    put("hops_per_node", float((delta >= 2).sum()) / n)
    put("mean_degree", deg.mean())
    put("std_degree", deg.std())
    put("span_degree", deg.max() / deg.min() if deg.min() > 0 else math.nan,
        None if deg.min() > 0 else "isolated node")

    census = nx.triadic_census(nxd)
    put("triads_021d", census["021D"])
    put("triads_021u", census["021U"])
    put("triads_021c", census["021C"])
    put("triads_030t", census["030T"])

    put("log_paths", ps.log_count)
    put("mean_path", ps.mean_len)
    put("std_paths", ps.std_len)
    put("min_path", ps.min_len)
    put("max_path", ps.max_len)
    put("span_path", ps.span)

    # --- centralities ---
    to_output = dist_d[:, n - 1]
    put("closeness_output", (n - 1) / float(to_output[:-1].sum()))
    closeness = np.zeros(n)
    for u in range(n):
        col = dist_d[:, u]
        reachable = np.isfinite(col)
        r = int(reachable.sum())  # includes u itself
        tot = float(col[reachable].sum())
        if r > 1 and tot > 0:
            closeness[u] = ((r - 1) / (n - 1)) * ((r - 1) / tot)
    put("closeness_mean", closeness.mean())
    put("betweenness_mean",
        float(np.mean(list(nx.betweenness_centrality(nxd, normalized=True).values()))))
    put("current_flow_closeness_mean",
        float(np.mean(list(nx.current_flow_closeness_centrality(nxu).values()))))
    put("current_flow_betweenness_mean",
        float(np.mean(list(nx.current_flow_betweenness_centrality(nxu).values()))))
    put("second_order_mean",
        float(np.mean(list(nx.second_order_centrality(nxu).values()))))
    put("communicability_betweenness_mean",
        float(np.mean(list(nx.communicability_betweenness_centrality(nxu).values()))))
    vals, vecs = np.linalg.eigh(adj)
    comm = (vecs * np.exp(vals)) @ vecs.T
    put("communicability_start_mean", float(comm[0].mean()))
    put("communicability_end_mean", float(comm[n - 1].mean()))

    ecc = dist_u.max(axis=1)
    put("radius", float(ecc.min()))
    put("diameter", float(ecc.max()))

    put("local_efficiency", _local_efficiency(und))
    inv = np.zeros_like(dist_u)
    off = ~np.eye(n, dtype=bool)
    inv[off] = 1.0 / dist_u[off]
    put("global_efficiency", float(inv[off].mean()))
    put("efficiency_io", 1.0 / float(dist_u[0, n - 1]))

    put("page_rank_output", nx.pagerank(nxd)[n - 1])

    p = adj / np.maximum(deg[:, None], 1.0)
    mmat = p + p @ p
    constraint = ((mmat ** 2) * (adj > 0)).sum(axis=1)
    put("constraint_mean", float(constraint.mean()))
    put("effective_size_mean", float((deg - a3_diag / np.maximum(deg, 1.0)).mean()))

    put("closeness_vitality_mean", _closeness_vitality_mean(und, dist_u))
    put("wiener_index_norm", _wiener_sum(dist_u) / (n * (n - 1) / 2.0))

    ordered = {c: values[c] for c in FEATURE_COLUMNS}
    return FeatureVector(ordered, notes)


def _local_efficiency(g: UndirectedGraph) -> float:
    """Mean over nodes of the global efficiency of the neighbor-induced subgraph."""
    adjsets = g.neighbors()
    total = 0.0
    for v in range(g.n):
        nbrs = adjsets[v]
        k = len(nbrs)
        if k < 2:
            continue
        index = {u: i for i, u in enumerate(nbrs)}
        sub = [(index[a], index[b]) for a, b in g.edges if a in index and b in index]
        dist = _distance_matrix(k, tuple(sub), directed=False)
        off = ~np.eye(k, dtype=bool)
        finite = np.isfinite(dist) & off
        total += float((1.0 / dist[finite]).sum()) / (k * (k - 1))
    return total / g.n


def _closeness_vitality_mean(g: UndirectedGraph, dist: np.ndarray) -> float:
    """Mean change of the finite-pair Wiener sum when deleting each node.

    Deleting a cut node disconnects pairs; those pairs simply stop
    contributing (instead of producing infinities), which keeps the
    feature finite for every graph.
    """
    w_all = _wiener_sum(dist)
    n = g.n
    total = 0.0
    for v in range(n):
        sub = tuple((a - (a > v), b - (b > v)) for a, b in g.edges if a != v and b != v)
        d = _distance_matrix(n - 1, sub, directed=False)
        total += w_all - _wiener_sum(d)
    return total / n


# ---------------------------------------------------------------------------
# dataset scaling
# ---------------------------------------------------------------------------

def scale_rows(rows: Sequence[Mapping[str, float]],
               powers: Mapping[str, float] | None = None) -> list[dict[str, float]]:
    """Per-column min-max to [0,1] across the dataset, then the declared power.

    Zero-range columns map to all zeros; NaN entries stay NaN and are
    ignored when computing the column range.
    """
    if len(rows) < 2:
        raise ValueError("scaling needs at least two feature rows")
    cols = list(rows[0])
    out: list[dict[str, float]] = [dict() for _ in rows]
    for c in cols:
        col = np.array([r[c] for r in rows], dtype=np.float64)
        finite = col[np.isfinite(col)]
        power = (powers or {}).get(c, FEATURE_POWERS.get(c, 1.0))
        if finite.size == 0:
            scaled = col
        else:
            lo, hi = float(finite.min()), float(finite.max())
            if hi == lo:
                scaled = np.where(np.isfinite(col), 0.0, np.nan)
            else:
                scaled = (col - lo) / (hi - lo)
            scaled = np.where(np.isfinite(scaled), np.abs(scaled) ** power, np.nan)
        for r, v in zip(out, scaled):
            r[c] = float(v)
    return out


def scale_features(dataset: Sequence[FeatureVector]) -> list[dict[str, float]]:
    """Scale a dataset of raw 54-feature vectors (see :func:`scale_rows`)."""
    return scale_rows([fv.values for fv in dataset])


def schema() -> list[dict]:
    """Column schema for CSV sidecars: name and post-scaling power."""
    cols = [{"name": c, "power": FEATURE_POWERS[c]} for c in FEATURE_COLUMNS]
    cols += [{"name": c, "power": 1.0} for c in EXTRA_COLUMNS]
    return cols


def analyze_dag(d: Dag, embedding: Embedding | None = None
                ) -> tuple[FeatureVector, dict[str, float], Embedding]:
    """Compute raw features plus the novel characteristics of a staged DAG.

    Shape statistics use ``embedding`` when the caller still holds the one
    that ordered the nodes (the dagify pipeline); DAGs built directly
    (rdag, composite, ablations) embed their underlying graph here.
    Returns (feature_vector, extras, embedding) where extras carries
    pca_elongation, n_bottlenecks, depth, width and is_q1d (as 0/1).
    """
    emb = embedding if embedding is not None else kamada_kawai(underlying_undirected(d))
    fv = compute_features(d, emb)
    verdict = q1d(d, emb)
    extras = {
        "pca_elongation": verdict.pca_elongation,
        "n_bottlenecks": float(verdict.n_bottlenecks),
        "depth": float(depth(d)),
        "width": float(width(d)),
        "is_q1d": 1.0 if verdict.is_q1d else 0.0,
    }
    return fv, extras, emb
