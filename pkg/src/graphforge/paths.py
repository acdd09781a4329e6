"""Exact path statistics, depth/width, and bridge counting for DAGs."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Dag, InvalidGraphError, UndirectedGraph, underlying_undirected


@dataclass(frozen=True)
class PathStats:
    """Input-to-output path census with exact integer counting.

    ``count`` is the exact number of directed paths from node 0 to node
    n-1 (arbitrary precision: a dense 60-node DAG has ~2^58 paths).
    Length statistics are over the full path-length distribution.
    """

    count: int
    log_count: float
    mean_len: float
    std_len: float
    min_len: int
    max_len: int

    @property
    def span(self) -> float:
        return self.max_len / self.min_len


def path_length_counts(d: Dag) -> list[int]:
    """Number of 0->(n-1) paths per length, as exact integers (index = length)."""
    n = d.n
    polys: list[list[int]] = [[] for _ in range(n)]
    polys[0] = [1]
    preds = d.predecessors()
    for j in range(1, n):
        acc: list[int] = []
        for i in preds[j]:
            src = polys[i]
            if not src:
                continue
            if len(acc) < len(src) + 1:
                acc.extend([0] * (len(src) + 1 - len(acc)))
            for length, cnt in enumerate(src):
                acc[length + 1] += cnt
        polys[j] = acc
    return polys[n - 1]


def count_paths(d: Dag) -> PathStats:
    counts = path_length_counts(d)
    total = sum(counts)
    if total == 0:
        raise InvalidGraphError("no input-to-output path; repair orphans first")
    s1 = sum(length * c for length, c in enumerate(counts))
    s2 = sum(length * length * c for length, c in enumerate(counts))
    mean = s1 / total
    var = max(s2 / total - mean * mean, 0.0)
    lengths = [length for length, c in enumerate(counts) if c > 0]
    return PathStats(
        count=total,
        log_count=math.log(total),
        mean_len=mean,
        std_len=math.sqrt(var),
        min_len=lengths[0],
        max_len=lengths[-1],
    )


def count_paths_total(d: Dag) -> int:
    """Exact path count only (cheaper than the full census)."""
    n = d.n
    acc = [0] * n
    acc[0] = 1
    for u, v in d.edges:
        if u < v:
            acc[v] += acc[u]
    return acc[n - 1]


def depth(d: Dag) -> int:
    """Longest input-to-output path length, in edges."""
    n = d.n
    neg = -1
    dist = [neg] * n
    dist[0] = 0
    for u, v in d.edges:  # lexicographic edge order is topological in u
        if dist[u] >= 0 and dist[u] + 1 > dist[v]:
            dist[v] = dist[u] + 1
    if dist[n - 1] < 0:
        raise InvalidGraphError("no input-to-output path; repair orphans first")
    return dist[n - 1]


def width_at(d: Dag, k: int) -> int:
    """Width at cut k: nodes u < k with some edge (u, w), w >= k."""
    return len({u for u, v in d.edges if u < k <= v})


def width(d: Dag) -> int:
    """Maximum number of simultaneously live nodes during feed-forward.

    Defined as max over k = 1..n-1 of :func:`width_at`.
    """
    n = d.n
    max_target = [-1] * n
    for u, v in d.edges:
        if v > max_target[u]:
            max_target[u] = v
    return max(sum(1 for u in range(k) if max_target[u] >= k) for k in range(1, n))


def bridges(g: UndirectedGraph) -> list[tuple[int, int]]:
    """Bridges of an undirected graph via iterative Tarjan low-link DFS."""
    n = g.n
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (neighbor, edge id)
    for eid, (u, v) in enumerate(g.edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    disc = [-1] * n
    low = [0] * n
    out: list[tuple[int, int]] = []
    timer = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]  # (node, parent edge id, next idx)
        while stack:
            u, pe, idx = stack.pop()
            if idx == 0:
                disc[u] = low[u] = timer
                timer += 1
            advanced = False
            while idx < len(adj[u]):
                v, eid = adj[u][idx]
                idx += 1
                if eid == pe:
                    continue
                if disc[v] == -1:
                    stack.append((u, pe, idx))
                    stack.append((v, eid, 0))
                    advanced = True
                    break
                low[u] = min(low[u], disc[v])
            if not advanced and pe != -1:
                # backtrack into parent
                p = g.edges[pe][0] if g.edges[pe][1] == u else g.edges[pe][1]
                if low[u] > disc[p]:
                    out.append(g.edges[pe])
                low[p] = min(low[p], low[u])
    return sorted(out)


def n_bottlenecks(d: Dag) -> int:
    """Number of bottleneck edges: bridges of the underlying undirected graph."""
    return len(bridges(underlying_undirected(d)))
