"""2D stress-minimizing embedding and the undirected-graph-to-DAG pipeline.

The pipeline embeds a connected undirected graph in the plane so that
Euclidean distances approximate shortest-path distances, derives a total
node order from the coordinates, orients every edge from the lower to the
higher rank, and finally repairs orphan nodes with adjacent-index edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .core import Dag, GraphForgeError, UndirectedGraph

ORDERING_METHODS = ("x", "radial", "reversed_radial", "bifocal")

GRAD_TOL = 1e-6
ITER_CAP_FACTOR = 10  # cap = ITER_CAP_FACTOR * n^2
# After the 1e-6 contract is met, a short bounded Newton polish settles the
# layout inside the basin it reached (stress is quartically flat along
# near-collinear bends, so a handful of quadratic steps pins those angles
# down).  The bound matters: symmetric layouts such as rings sit near
# saddle points, and an unbounded descent would slowly tunnel out of them.
POLISH_ITERS = 12
GRAD_TOL_POLISH = 1e-10


class DisconnectedGraphError(GraphForgeError, ValueError):
    """Raised when an embedding is requested for a disconnected graph."""


@dataclass(frozen=True, eq=False)
class Embedding:
    """Per-node 2D coordinates plus the final stress value."""

    coords: np.ndarray  # (n, 2) float64
    stress: float

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError("coords must have shape (n, 2)")
        coords = coords.copy()
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if self.stress < 0:
            raise ValueError("stress must be non-negative")

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def undirected_distances(g: UndirectedGraph) -> np.ndarray:
    """All-pairs unweighted shortest-path distances; inf marks disconnection."""
    if not g.edges:
        d = np.full((g.n, g.n), np.inf)
        np.fill_diagonal(d, 0.0)
        return d
    rows = [u for u, _ in g.edges] + [v for _, v in g.edges]
    cols = [v for _, v in g.edges] + [u for u, _ in g.edges]
    a = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(g.n, g.n))
    return shortest_path(a, method="D", unweighted=True)


def _stress_grad(x: np.ndarray, d: np.ndarray, w: np.ndarray):
    diff = x[:, None, :] - x[None, :, :]
    r = np.sqrt((diff ** 2).sum(-1))
    np.fill_diagonal(r, 1.0)
    r = np.maximum(r, 1e-12)
    err = r - d
    np.fill_diagonal(err, 0.0)
    s = 0.5 * float((w * err ** 2).sum())  # pairs are double counted
    coef = 2.0 * w * err / r
    g = (coef[:, :, None] * diff).sum(axis=1)
    return s, g, diff, r


def _stress_hessian(diff: np.ndarray, r: np.ndarray, d: np.ndarray, w: np.ndarray) -> np.ndarray:
    n = diff.shape[0]
    e = diff / r[:, :, None]
    proj = e[:, :, :, None] * e[:, :, None, :]
    eye = np.eye(2)
    blk = 2.0 * w[:, :, None, None] * (proj + (1.0 - d / r)[:, :, None, None] * (eye - proj))
    np.einsum("iikl->ikl", blk)[:] = 0.0
    h = np.zeros((n, 2, n, 2))
    h -= blk.transpose(0, 2, 1, 3)
    idx = np.arange(n)
    h[idx, :, idx, :] += blk.sum(axis=1)
    return h.reshape(2 * n, 2 * n)


def stress_of(coords: np.ndarray, d: np.ndarray) -> float:
    """Stress of a layout against target distances: sum (|xu-xv| - duv)^2 / duv^2."""
    w = np.zeros_like(d)
    mask = d > 0
    w[mask] = 1.0 / d[mask] ** 2
    s, _, _, _ = _stress_grad(np.asarray(coords, dtype=float), d, w)
    return s


def canonicalize_coords(coords: np.ndarray, anchor: int = 0) -> np.ndarray:
    """Center coordinates and rotate principal axes onto (x, y).

    Signs are fixed so the anchor node (node 0) has non-negative
    coordinates, which removes the rotation/reflection degeneracy of the
    stress optimum before any coordinate-based ordering.
    """
    x = np.asarray(coords, dtype=np.float64)
    x = x - x.mean(axis=0)
    cov = x.T @ x
    vals, vecs = np.linalg.eigh(cov)
    rot = vecs[:, ::-1]  # principal axis first
    y = x @ rot
    for k in range(2):
        if y[anchor, k] < 0:
            y[:, k] = -y[:, k]
    return y


def kamada_kawai(g: UndirectedGraph) -> Embedding:
    """Embed a connected graph by minimizing distance-weighted stress.

    Deterministic: starts from the circular layout by node index and runs a
    damped-Newton descent with backtracking line search until the gradient
    max-norm falls below 1e-6 (or the 10*n^2 iteration cap), followed by a
    bounded polish (see POLISH_ITERS).  The final coordinates are
    canonicalized via :func:`canonicalize_coords`.
    """
    d = undirected_distances(g)
    if np.isinf(d).any():
        raise DisconnectedGraphError("embedding requires a connected graph")
    n = g.n
    w = np.zeros_like(d)
    mask = d > 0
    w[mask] = 1.0 / d[mask] ** 2

    ang = 2.0 * np.pi * np.arange(n) / n
    x = np.column_stack([np.cos(ang), np.sin(ang)])

    s, grad, diff, r = _stress_grad(x, d, w)
    lam = 1e-3
    eye = np.eye(2 * n)
    max_iter = ITER_CAP_FACTOR * n * n
    polish_left = POLISH_ITERS
    for _ in range(max_iter):
        gmax = np.abs(grad).max()
        if gmax < GRAD_TOL:
            if gmax < GRAD_TOL_POLISH or polish_left == 0:
                break
            polish_left -= 1
        h = _stress_hessian(diff, r, d, w)
        step = None
        for _ in range(30):
            try:
                step = np.linalg.solve(h + lam * eye, -grad.reshape(-1))
                break
            except np.linalg.LinAlgError:
                lam *= 10.0
        if step is None or not np.isfinite(step).all():
            step = -grad.reshape(-1)
        descent = float(grad.reshape(-1) @ step)
        if descent >= 0:  # damping too weak for a descent direction
            lam *= 10.0
            continue
        t = 1.0
        accepted = False
        for _ in range(40):
            xn = x + t * step.reshape(n, 2)
            sn, gn, diffn, rn = _stress_grad(xn, d, w)
            if sn <= s + 1e-4 * t * descent:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            lam *= 10.0
            if lam > 1e14:
                break
            continue
        x, s, grad, diff, r = xn, sn, gn, diffn, rn
        lam = max(lam * 0.25, 1e-10)
    return Embedding(canonicalize_coords(x), s)


def order_nodes(e: Embedding, method: str, graph: Optional[UndirectedGraph] = None) -> np.ndarray:
    """Total node order from an embedding; returns nodes in rank order.

    ``x`` sorts by x-coordinate, ``radial`` by coordinate norm,
    ``reversed_radial`` by descending norm.  ``bifocal`` fixes the two
    nodes at maximal graph distance as first/last (lexicographically
    smallest pair on ties) and ranks interior node i by
    (d_to_first - d_to_last) / (d_to_first + d_to_last).  All ties break
    by node index.
    """
    coords = e.coords
    n = e.n
    if method == "x":
        return np.argsort(coords[:, 0], kind="stable")
    if method == "radial":
        return np.argsort(np.hypot(coords[:, 0], coords[:, 1]), kind="stable")
    if method == "reversed_radial":
        return np.argsort(-np.hypot(coords[:, 0], coords[:, 1]), kind="stable")
    if method == "bifocal":
        if graph is None:
            raise ValueError("bifocal ordering needs the graph for distances")
        d = undirected_distances(graph)
        if np.isinf(d).any():
            raise DisconnectedGraphError("bifocal ordering requires a connected graph")
        best = np.unravel_index(np.argmax(d), d.shape)
        diam = d[best]
        pairs = np.argwhere(d == diam)
        pairs = pairs[pairs[:, 0] < pairs[:, 1]]
        a, b = min(map(tuple, pairs))
        interior = [i for i in range(n) if i not in (a, b)]
        score = (d[:, a] - d[:, b]) / (d[:, a] + d[:, b])
        interior.sort(key=lambda i: (score[i], i))
        return np.array([a, *interior, b], dtype=np.int64)
    raise ValueError(f"unknown ordering method {method!r}")


def orient_edges(g: UndirectedGraph, order: Sequence[int]) -> Dag:
    """Relabel nodes by rank and direct each edge from lower to higher rank."""
    order = list(int(i) for i in order)
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of 0..n-1")
    rank = [0] * g.n
    for pos, node in enumerate(order):
        rank[node] = pos
    edges = tuple((min(rank[u], rank[v]), max(rank[u], rank[v])) for u, v in g.edges)
    return Dag(g.n, edges, stages=None)


def orphan_count(d: Dag) -> int:
    """Number of orphan conditions: missing-input plus missing-output nodes."""
    indeg = d.in_degrees()
    outdeg = d.out_degrees()
    return int((indeg[1:] == 0).sum() + (outdeg[:-1] == 0).sum())


def fix_orphans(d: Dag) -> tuple[Dag, int]:
    """Repair orphan nodes with adjacent-index edges; returns (dag, repairs).

    Single ascending sweep: node i > 0 without input gains (i-1, i), node
    i < n-1 without output gains (i, i+1).  Edges added earlier in the
    sweep count toward the degrees seen later.
    """
    n = d.n
    edges = set(d.edges)
    indeg = d.in_degrees().tolist()
    outdeg = d.out_degrees().tolist()
    repairs = 0
    for i in range(n):
        if i > 0 and indeg[i] == 0:
            edges.add((i - 1, i))
            indeg[i] += 1
            outdeg[i - 1] += 1
            repairs += 1
        if i < n - 1 and outdeg[i] == 0:
            edges.add((i, i + 1))
            outdeg[i] += 1
            indeg[i + 1] += 1
            repairs += 1
    return Dag(n, tuple(edges), d.stages), repairs


def permute_embedding(e: Embedding, order: Sequence[int]) -> Embedding:
    """Relabel coordinates so row k belongs to the node ranked k by ``order``."""
    idx = np.asarray(list(order), dtype=np.int64)
    return Embedding(np.asarray(e.coords)[idx], e.stress)


def dagify_embedded(g: UndirectedGraph, method: str = "x") -> tuple[Dag, Embedding]:
    """Full pipeline: embed, order, orient, repair orphans. Deterministic.

    Returns the DAG together with the ordering embedding expressed in the
    DAG's (rank) labels: downstream shape statistics reuse the coordinates
    that fixed the node order instead of re-embedding the relabeled graph.
    """
    emb = kamada_kawai(g)
    order = order_nodes(emb, method, graph=g if method == "bifocal" else None)
    dag, _ = fix_orphans(orient_edges(g, order))
    return dag, permute_embedding(emb, order)


def dagify(g: UndirectedGraph, method: str = "x") -> Dag:
    """See :func:`dagify_embedded`; returns only the DAG."""
    return dagify_embedded(g, method)[0]


def largest_component(g: UndirectedGraph) -> UndirectedGraph:
    """Induced subgraph on the largest connected component, relabeled 0..k-1.

    Ties pick the component containing the smallest node index.  Isolated
    nodes count as size-1 components.
    """
    adj = g.neighbors()
    seen = [False] * g.n
    best: list[int] = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        if len(comp) > len(best):
            best = comp
    nodes = sorted(best)
    relabel = {node: i for i, node in enumerate(nodes)}
    keep = set(nodes)
    edges = tuple((relabel[u], relabel[v]) for u, v in g.edges if u in keep and v in keep)
    if len(nodes) < 2:
        raise DisconnectedGraphError("largest component has fewer than 2 nodes")
    return UndirectedGraph(len(nodes), edges)
