"""Core graph types, validation, and the deterministic randomness contract.

Node identity is positional: nodes of an ``n``-node graph are exactly the
integers ``0..n-1`` and all serialization uses indices.  DAG edges always
point from a lower to a higher index, so acyclicity holds by construction.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

import numpy as np


class GraphForgeError(Exception):
    """Base class for all graphforge errors."""


class InvalidGraphError(GraphForgeError, ValueError):
    """A graph value violates a structural precondition."""


class DataError(GraphForgeError, ValueError):
    """An input file or payload cannot be interpreted."""


def _canonical_edges(edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted({(int(u), int(v)) for u, v in edges}))


@dataclass(frozen=True)
class UndirectedGraph:
    """Simple undirected graph: node count plus a set of unordered pairs.

    Edges are stored canonically as ``(u, v)`` with ``u < v``, sorted
    lexicographically.  No self-loops, no duplicates, no multi-edges.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 2:
            raise InvalidGraphError(f"undirected graph needs n >= 2, got {self.n}")
        canon = _canonical_edges((min(u, v), max(u, v)) for u, v in self.edges)
        for u, v in canon:
            if u == v:
                raise InvalidGraphError(f"self-loop at node {u}")
            if not (0 <= u < v < self.n):
                raise InvalidGraphError(f"edge ({u},{v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", canon)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for u, v in self.edges:
            a[u, v] = 1
            a[v, u] = 1
        return a

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj


@dataclass(frozen=True)
class Dag:
    """Index-ordered DAG with optional three-stage assignment.

    Construction is permissive about edge direction so that
    :func:`validate_dag` can report backward edges; every other operation
    assumes a validated value.  ``stages`` maps node index to stage
    ``{0,1,2}`` and is ``None`` until assigned.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    stages: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.n < 3:
            raise InvalidGraphError(f"dag needs n >= 3 (one node per stage), got {self.n}")
        canon = _canonical_edges(self.edges)
        for u, v in canon:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidGraphError(f"edge ({u},{v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", canon)
        if self.stages is not None:
            st = tuple(int(s) for s in self.stages)
            if len(st) != self.n:
                raise InvalidGraphError("stages length must equal node count")
            object.__setattr__(self, "stages", st)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def in_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for _, v in self.edges:
            deg[v] += 1
        return deg

    def out_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, _ in self.edges:
            deg[u] += 1
        return deg

    def successors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
        for lst in adj:
            lst.sort()
        return adj

    def predecessors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj

    def with_stages(self, stages: Sequence[int]) -> "Dag":
        return Dag(self.n, self.edges, tuple(int(s) for s in stages))


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    node: Optional[int] = None
    edge: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def validate_dag(dag: Dag) -> ValidationReport:
    """Diagnostic check of all Dag invariants; empty report iff they hold.

    Flags backward edges (``i >= j``), sourceless orphans (node ``i > 0``
    with in-degree 0), sinkless orphans (node ``i < n-1`` with out-degree
    0), non-monotone stage assignments and empty stages.
    """
    out: list[Violation] = []
    n = dag.n
    indeg = [0] * n
    outdeg = [0] * n
    for u, v in dag.edges:
        if u >= v:
            out.append(Violation("backward_edge", f"edge ({u},{v}) must satisfy i<j", edge=(u, v)))
            continue
        indeg[v] += 1
        outdeg[u] += 1
    for i in range(1, n):
        if indeg[i] == 0:
            out.append(Violation("sourceless_orphan", f"node {i} has no ingoing edge", node=i))
    for i in range(n - 1):
        if outdeg[i] == 0:
            out.append(Violation("sinkless_orphan", f"node {i} has no outgoing edge", node=i))
    if dag.stages is not None:
        st = dag.stages
        for s in st:
            if s not in (0, 1, 2):
                out.append(Violation("bad_stage", f"stage value {s} outside 0..2"))
                break
        for i in range(1, n):
            if st[i] < st[i - 1]:
                out.append(Violation("stage_decreasing", f"stage drops at node {i}", node=i))
        if n >= 3:
            present = set(st)
            for s in (0, 1, 2):
                if s not in present:
                    out.append(Violation("empty_stage", f"stage {s} has no nodes"))
    return ValidationReport(tuple(out))


def underlying_undirected(dag: Dag) -> UndirectedGraph:
    """Forget edge directions: each (i, j) becomes the unordered pair {i, j}."""
    return UndirectedGraph(dag.n, tuple((min(u, v), max(u, v)) for u, v in dag.edges))


@dataclass(frozen=True)
class RngSpec:
    """Deterministic randomness contract: one root seed plus a stream label.

    Identical ``(seed, stream)`` pairs reproduce identical draws across runs
    and platforms; independent stream labels give independent draws, so a
    batch may be evaluated in any order or degree of parallelism.
    """

    seed: int
    stream: str = ""

    def derive(self, label: str) -> "RngSpec":
        stream = f"{self.stream}/{label}" if self.stream else label
        return RngSpec(self.seed, stream)

    def generator(self) -> np.random.Generator:
        digest = hashlib.sha256(f"{self.seed}\x1f{self.stream}".encode()).digest()
        entropy = int.from_bytes(digest, "little")
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(root_seed: int, label: str) -> int:
    """63-bit seed derived from a root seed and a stable label."""
    digest = hashlib.sha256(f"{root_seed}\x1f{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") & ((1 << 63) - 1)


# ---------------------------------------------------------------------------
# Graph file format (JSON)
#
#   {"n": int, "edges": [[i, j], ...], "stages": [s_0, ..., s_{n-1}] | null,
#    "meta": {"family": str, "params": {...}, "seed": int}}
#
# Edges are sorted lexicographically; the ordering is part of the format so
# that re-runs are byte-identical.  ``stages: null`` marks an undirected
# graph, a stage list marks a DAG.
# ---------------------------------------------------------------------------

GraphLike = Union[UndirectedGraph, Dag]


def graph_to_dict(g: GraphLike, meta: Optional[Mapping[str, Any]] = None) -> dict:
    meta = dict(meta or {})
    doc = {
        "n": g.n,
        "edges": [[u, v] for u, v in g.edges],
        "stages": None,
        "meta": {
            "family": meta.get("family"),
            "params": meta.get("params", {}),
            "seed": meta.get("seed"),
        },
    }
    if isinstance(g, Dag):
        if g.stages is None:
            raise InvalidGraphError("refusing to serialize a DAG without stages")
        doc["stages"] = list(g.stages)
    return doc


def graph_from_dict(doc: Mapping[str, Any]) -> tuple[GraphLike, dict]:
    try:
        n = int(doc["n"])
        edges = tuple((int(u), int(v)) for u, v in doc["edges"])
        stages = doc.get("stages")
        meta = dict(doc.get("meta") or {})
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed graph document: {exc}") from exc
    if stages is None:
        return UndirectedGraph(n, edges), meta
    return Dag(n, edges, tuple(int(s) for s in stages)), meta


def dumps_json(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_json_atomic(path: Union[str, os.PathLike], doc: Any) -> None:
    """Serialize to JSON and rename into place so readers never see partial files."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(dumps_json(doc))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_graph(path: Union[str, os.PathLike], g: GraphLike,
                meta: Optional[Mapping[str, Any]] = None) -> None:
    write_json_atomic(path, graph_to_dict(g, meta))


def read_graph(path: Union[str, os.PathLike]) -> tuple[GraphLike, dict]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read graph file {path}: {exc}") from exc
    return graph_from_dict(doc)
