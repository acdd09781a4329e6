"""Random graph generators: er, ba, ws, rdag, composite, and fmri families.

All generators are pure functions of their parameters and an
:class:`~graphforge.core.RngSpec`; two runs with the same spec produce
byte-identical graphs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import Dag, GraphForgeError, RngSpec, UndirectedGraph
from .features import average_clustering_underlying, global_reaching_centrality
from .layout import dagify, fix_orphans, largest_component
from .paths import count_paths_total


class GenerationError(GraphForgeError, ValueError):
    """Generator parameters cannot produce a usable graph."""


# ---------------------------------------------------------------------------
# classical undirected families
# ---------------------------------------------------------------------------

def gen_er(n: int, p: float, rng: RngSpec) -> UndirectedGraph:
    """Erdos-Renyi: each of the C(n,2) edges appears independently with prob p."""
    if not 0.0 <= p <= 1.0:
        raise GenerationError(f"edge probability must lie in [0,1], got {p}")
    g = rng.generator()
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    draws = g.random(len(pairs))
    edges = tuple(pair for pair, r in zip(pairs, draws) if r < p)
    return UndirectedGraph(n, edges)


def gen_ba(n: int, m: int, rng: RngSpec) -> UndirectedGraph:
    """Preferential attachment with a star seed on m+1 nodes.

    Nodes m..n-1 each attach m edges to distinct existing nodes chosen
    proportionally to current degree, so the result has exactly m*(n-m)
    edges and is connected.
    """
    if not 1 <= m < n:
        raise GenerationError(f"attachment count must satisfy 1 <= m < n, got m={m}, n={n}")
    g = rng.generator()
    edges: set[tuple[int, int]] = set()
    targets = list(range(m))
    repeated: list[int] = []
    for v in range(m, n):
        for t in targets:
            edges.add((min(t, v), max(t, v)))
        repeated.extend(targets)
        repeated.extend([v] * m)
        if v + 1 < n:
            chosen: set[int] = set()
            while len(chosen) < m:
                chosen.add(repeated[int(g.integers(len(repeated)))])
            targets = sorted(chosen)
    return UndirectedGraph(n, tuple(edges))


def gen_ws(n: int, k: int, p: float, rng: RngSpec) -> UndirectedGraph:
    """Watts-Strogatz ring lattice with per-edge rewiring.

    Each node starts joined to its k nearest ring neighbors; every lattice
    edge is rewired with probability p to a uniform non-duplicate target.
    The edge count is exactly n*k/2 for every p; connectivity is not
    guaranteed once p > 0.
    """
    if k % 2 != 0:
        raise GenerationError(f"ring neighbor count k must be even, got {k}")
    if not 2 <= k < n:
        raise GenerationError(f"k must satisfy 2 <= k < n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise GenerationError(f"rewiring probability must lie in [0,1], got {p}")
    g = rng.generator()
    edges: set[tuple[int, int]] = set()
    deg = [0] * n

    def add(a: int, b: int) -> None:
        edges.add((min(a, b), max(a, b)))
        deg[a] += 1
        deg[b] += 1

    def remove(a: int, b: int) -> None:
        edges.discard((min(a, b), max(a, b)))
        deg[a] -= 1
        deg[b] -= 1

    for lane in range(1, k // 2 + 1):
        for u in range(n):
            add(u, (u + lane) % n)
    for lane in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + lane) % n
            if g.random() < p:
                if deg[u] >= n - 1:
                    continue  # saturated node, nothing to rewire to
                w = int(g.integers(n))
                while w == u or (min(u, w), max(u, w)) in edges:
                    w = int(g.integers(n))
                remove(u, v)
                add(u, w)
    return UndirectedGraph(n, tuple(edges))


# ---------------------------------------------------------------------------
# direct random DAG construction
# ---------------------------------------------------------------------------

_EXP_TAG = re.compile(r"^exp(\d+(?:\.\d+)?)$")

OutDegreeSpec = Union[int, str, Sequence[int]]


@dataclass(frozen=True)
class RdagParams:
    """Parameters of the direct DAG generator.

    ``n_out`` fixes the per-node outgoing-edge quota: a constant, an
    explicit per-node list, ``"laplace"`` (Laplace(loc=3, scale=3) rounded
    and clamped to >= 1) or ``"hub"`` (two hubs with quota n//3 against a
    background of 2, hub positions drawn from the stream).

    ``f`` tags the locality weighting of a candidate target j from source
    i, applied to the bucket index floor((j-i)/b): ``exp<C>`` decays as
    exp(-C*x), ``pow1`` as 1/max(x, 1), ``one`` is flat.  ``alpha`` is the
    preferential-attachment exponent on the target's quota.

    ``forced_edge_counts`` controls whether the forced chain edge i->i+1
    (added when node i+1 would otherwise lack an input) consumes one unit
    of node i's quota.  Counting it avoids out-degree overshoot for
    n_out=1 and is the default.
    """

    n: int
    n_out: OutDegreeSpec
    f: str = "exp3"
    b: int = 5
    alpha: float = 0.5
    forced_edge_counts: bool = True

    def __post_init__(self):
        if self.n < 3:
            raise GenerationError(f"rdag needs n >= 3, got {self.n}")
        if self.b < 1:
            raise GenerationError(f"neighborhood size must be >= 1, got {self.b}")
        if isinstance(self.n_out, int):
            if self.n_out < 1:
                raise GenerationError("constant out-degree must be >= 1")
        elif isinstance(self.n_out, str):
            if self.n_out not in ("laplace", "hub"):
                raise GenerationError(f"unknown out-degree spec {self.n_out!r}")
        else:
            quotas = tuple(int(q) for q in self.n_out)
            if len(quotas) != self.n:
                raise GenerationError("explicit out-degree list must have one entry per node")
            if any(q < 1 for q in quotas[:-1]):
                raise GenerationError("out-degree must be >= 1 for every non-output node")
            object.__setattr__(self, "n_out", quotas)
        self.weight_fn()  # validate the tag eagerly

    def weight_fn(self):
        if self.f == "one":
            return lambda x: 1.0
        if self.f == "pow1":
            return lambda x: 1.0 / max(x, 1)
        m = _EXP_TAG.match(self.f)
        if m:
            c = float(m.group(1))
            return lambda x: math.exp(-c * x)
        raise GenerationError(f"unknown weighting function tag {self.f!r}")


def resolve_out_degrees(params: RdagParams, g: np.random.Generator) -> np.ndarray:
    if isinstance(params.n_out, int):
        return np.full(params.n, params.n_out, dtype=np.int64)
    if params.n_out == "laplace":
        raw = np.rint(g.laplace(loc=3.0, scale=3.0, size=params.n))
        return np.clip(raw, 1, None).astype(np.int64)
    if params.n_out == "hub":
        quotas = np.full(params.n, 2, dtype=np.int64)
        hubs = g.choice(params.n - 1, size=2, replace=False)
        quotas[np.sort(hubs)] = max(params.n // 3, 2)
        return quotas
    return np.asarray(params.n_out, dtype=np.int64)


def gen_rdag(params: RdagParams, rng: RngSpec) -> Dag:
    """Directly build a random DAG with controllable connection locality.

    For each source i in order: force the chain edge i->i+1 if node i+1
    has no input yet, then sample distinct forward targets j > i with
    probability proportional to (n_j_out)^alpha * f(floor((j-i)/b)) until
    the quota min(n_i_out, n-1-i) is met.
    """
    n = params.n
    g = rng.generator()
    quotas = resolve_out_degrees(params, g)
    f = params.weight_fn()
    base = quotas.astype(np.float64) ** params.alpha

    edges: set[tuple[int, int]] = set()
    indeg = [0] * n
    targets: list[set[int]] = [set() for _ in range(n)]

    for i in range(n - 1):
        used = 0
        if indeg[i + 1] == 0:
            edges.add((i, i + 1))
            targets[i].add(i + 1)
            indeg[i + 1] += 1
            if params.forced_edge_counts:
                used += 1
        quota = min(int(quotas[i]), n - 1 - i)
        cand = [j for j in range(i + 1, n) if j not in targets[i]]
        weights = np.array([base[j] * f((j - i) // params.b) for j in cand])
        while used < quota and cand:
            cum = np.cumsum(weights)
            pick = int(np.searchsorted(cum, g.random() * cum[-1], side="right"))
            pick = min(pick, len(cand) - 1)
            j = cand.pop(pick)
            weights = np.delete(weights, pick)
            edges.add((i, j))
            targets[i].add(j)
            indeg[j] += 1
            used += 1
    dag, _ = fix_orphans(Dag(n, tuple(edges)))
    return dag


# ---------------------------------------------------------------------------
# composite graphs: Monte-Carlo maximization of a structural objective
# ---------------------------------------------------------------------------

def composite_objective(d: Dag) -> float:
    """sqrt(log_num_paths / num_nodes) - 2*grc - avg_clustering."""
    lp = math.log(count_paths_total(d))
    return math.sqrt(lp / d.n) - 2.0 * global_reaching_centrality(d) - average_clustering_underlying(d)


def gen_composite(n: int, p_init: float, budget: int, rng: RngSpec,
                  trace: Optional[list[float]] = None) -> Dag:
    """Hill-climb the composite objective from a dagified dense seed graph.

    Each step toggles one uniformly random unordered pair, re-repairs
    orphans, and accepts the move iff the objective strictly increases,
    so the accepted-objective sequence is non-decreasing and the result
    never scores below the initial DAG.
    """
    if budget < 0:
        raise GenerationError("budget must be non-negative")
    seed_graph = gen_er(n, p_init, rng.derive("init"))
    seed_graph = largest_component(seed_graph)
    d = dagify(seed_graph, "x")
    obj = composite_objective(d)
    if trace is not None:
        trace.append(obj)
    g = rng.derive("search").generator()
    npairs = d.n * (d.n - 1) // 2
    for _ in range(budget):
        r = int(g.integers(npairs))
        # unrank the pair index to (i, j), i < j
        i = d.n - 2 - int((math.isqrt(8 * (npairs - 1 - r) + 1) - 1) // 2)
        j = r - (i * (2 * d.n - i - 1)) // 2 + i + 1
        edges = set(d.edges)
        pair = (i, j)
        if pair in edges:
            edges.remove(pair)
        else:
            edges.add(pair)
        cand, _ = fix_orphans(Dag(d.n, tuple(edges), d.stages))
        cand_obj = composite_objective(cand)
        if cand_obj > obj:
            d, obj = cand, cand_obj
            if trace is not None:
                trace.append(obj)
    return d


# ---------------------------------------------------------------------------
# fMRI-derived graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FmriParams:
    """Thresholding parameters for a z-scored partial-correlation matrix.

    The matrix is symmetrized and its diagonal cleared on construction.
    """

    matrix: np.ndarray
    threshold: float
    target_n: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GenerationError(f"correlation matrix must be square, got shape {m.shape}")
        m = 0.5 * (m + m.T)
        np.fill_diagonal(m, 0.0)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.threshold <= 0:
            raise GenerationError(f"threshold must be positive, got {self.threshold}")
        if not 2 <= self.target_n <= m.shape[0]:
            raise GenerationError(
                f"target_n must lie in [2, {m.shape[0]}], got {self.target_n}")


def load_fmri_matrix(path) -> np.ndarray:
    """Read a header-less square CSV of reals (row-major)."""
    m = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    if m.shape[0] != m.shape[1]:
        raise GenerationError(f"matrix file {path} is not square: shape {m.shape}")
    return m


def gen_fmri(params: FmriParams, rng: RngSpec) -> UndirectedGraph:
    """Binarize |matrix| >= threshold, keep the largest component, subsample.

    When the component exceeds ``target_n`` nodes, an induced-subgraph
    random walk collects ``target_n`` distinct nodes (restarting at a
    uniform visited node after 10*target_n steps without progress).  The
    output is connected with exactly min(target_n, component size) nodes.
    """
    m = params.matrix
    dim = m.shape[0]
    mask = np.abs(m) >= params.threshold
    edges = tuple((int(u), int(v)) for u, v in zip(*np.nonzero(np.triu(mask, k=1))))
    if not edges:
        raise GenerationError(
            f"threshold {params.threshold} leaves no edges; no usable component")
    comp = largest_component(UndirectedGraph(dim, edges))
    if comp.n <= params.target_n:
        return comp

    g = rng.generator()
    adj = comp.neighbors()
    cur = int(g.integers(comp.n))
    visited = {cur}
    stuck = 0
    limit = 10 * params.target_n
    while len(visited) < params.target_n:
        nxt = adj[cur][int(g.integers(len(adj[cur])))]
        if nxt in visited:
            stuck += 1
            if stuck >= limit:
                anchors = sorted(visited)
                nxt = anchors[int(g.integers(len(anchors)))]
                stuck = 0
        else:
            visited.add(nxt)
            stuck = 0
        cur = nxt
    nodes = sorted(visited)
    relabel = {node: i for i, node in enumerate(nodes)}
    keep = set(nodes)
    sub_edges = tuple((relabel[u], relabel[v]) for u, v in comp.edges if u in keep and v in keep)
    # every visited node was entered along an edge from a visited node, so
    # the induced subgraph is connected by construction
    return UndirectedGraph(len(nodes), sub_edges)
