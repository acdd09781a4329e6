"""Stage assignment, parameter-count model, channel solver, and spec export.

The network semantics behind the counts: node 0 is a stem (3x3 conv from
the image channels plus batch-norm), interior nodes aggregate their inputs
with one learned scalar per ingoing edge, apply ReLU - 3x3 conv -
batch-norm, and add a 1x1-projection residual from the aggregate; every
stage-crossing edge runs the same triplet with a strided conv; the output
node pools its weighted sum and applies a dense head.  Convolutions are
bias-free (batch-norm supplies the affine terms), the residual projection
carries no normalization, and the head has weights plus biases.  The
builder in the companion trainer package mirrors this accounting exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Union

from .core import (Dag, DataError, GraphForgeError, InvalidGraphError,
                   dumps_json, graph_from_dict, graph_to_dict, validate_dag,
                   write_json_atomic)
from .layout import fix_orphans

# Training regime recorded into every exported spec.
TRAIN_META: dict[str, Any] = {
    "epochs": 100,
    "batch": 128,
    "lr": 0.1,
    "momentum": 0.9,
    "weight_decay": 1e-4,
    "lr_drops": [80, 90],
}

DEFAULT_TARGET_PARAMS = 853_000  # ResNet-56-for-CIFAR-10 budget

NODE_STEM = "stem"
NODE_RESIDUAL = "node"
NODE_HEAD = "head"


class ChannelSolveError(GraphForgeError, ValueError):
    """The requested parameter target is unreachable."""


@dataclass(frozen=True)
class ChannelPlan:
    """Base width C with per-stage channels (C, 2C, 4C)."""

    base: int
    num_classes: int = 10
    input_channels: int = 3

    def __post_init__(self):
        if self.base < 1:
            raise ValueError(f"base channel count must be >= 1, got {self.base}")
        if self.num_classes < 1 or self.input_channels < 1:
            raise ValueError("num_classes and input_channels must be >= 1")

    @property
    def stage_channels(self) -> tuple[int, int, int]:
        return (self.base, 2 * self.base, 4 * self.base)

    def channels(self, stage: int) -> int:
        return self.base * (1 << stage)


def assign_stages(d: Dag) -> Dag:
    """Partition node indices into three contiguous near-equal stages.

    Sizes are balanced with the remainder going to the earliest stages
    (n=31 gives 11/10/10), keeping stages non-decreasing in node index.
    """
    n = d.n
    if n < 3:
        raise InvalidGraphError("stage assignment needs n >= 3")
    base, rem = divmod(n, 3)
    sizes = [base + (1 if s < rem else 0) for s in range(3)]
    stages: list[int] = []
    for s, size in enumerate(sizes):
        stages.extend([s] * size)
    return d.with_stages(stages)


def param_count(d: Dag, plan: ChannelPlan) -> int:
    """Exact trainable-parameter count of the network a staged DAG defines."""
    if d.stages is None:
        raise InvalidGraphError("parameter model needs assigned stages")
    st = d.stages
    ch = plan.channels
    indeg = d.in_degrees()
    total = 0
    # stem: 3x3 conv image->C (bias-free) + batch-norm
    total += 9 * plan.input_channels * plan.base + 2 * plan.base
    # interior residual nodes
    for v in range(1, d.n - 1):
        c = ch(st[v])
        total += int(indeg[v]) + 9 * c * c + 2 * c + c * c
    # output head: aggregation scalars + dense from the last stage width
    total += int(indeg[d.n - 1]) + ch(st[d.n - 1]) * plan.num_classes + plan.num_classes
    # downsampling blocks on stage-crossing edges
    for u, v in d.edges:
        if st[u] != st[v]:
            total += 9 * ch(st[u]) * ch(st[v]) + 2 * ch(st[v])
    return total


def solve_channels(d: Dag, target: int, num_classes: int = 10,
                   input_channels: int = 3) -> ChannelPlan:
    """Integer base width whose parameter count is closest to the target.

    ``param_count`` is strictly increasing in C, so a doubling search plus
    bisection finds the crossover; ties go to the smaller C.
    """
    def count(c: int) -> int:
        return param_count(d, ChannelPlan(c, num_classes, input_channels))

    if target < count(1):
        raise ChannelSolveError(
            f"target {target} lies below the C=1 parameter count {count(1)}")
    hi = 1
    while count(hi) <= target:
        hi *= 2
    lo = hi // 2  # count(lo) <= target < count(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if count(mid) <= target:
            lo = mid
        else:
            hi = mid
    below, above = count(lo), count(hi)
    best = lo if target - below <= above - target else hi
    return ChannelPlan(best, num_classes, input_channels)


def bottleneck_ablation(d: Dag) -> Dag:
    """Erase all stage-crossing edges and reconnect stages by single gateways.

    One edge joins the last node of each stage to the first node of the
    next; orphans created by the erasure are repaired afterwards.  The
    result has exactly one crossing edge per stage boundary.
    """
    if d.stages is None:
        raise InvalidGraphError("bottleneck ablation needs assigned stages")
    st = d.stages
    edges = {(u, v) for u, v in d.edges if st[u] == st[v]}
    for s in sorted(set(st))[:-1]:
        last = max(i for i in range(d.n) if st[i] == s)
        first = min(i for i in range(d.n) if st[i] == s + 1)
        edges.add((last, first))
    repaired, _ = fix_orphans(Dag(d.n, tuple(edges), st))
    return repaired


@dataclass(frozen=True)
class NodeDesc:
    id: int
    kind: str  # stem | node | head
    stage: int


@dataclass(frozen=True)
class EdgeDesc:
    src: int
    dst: int
    stride: int  # 1 within a stage, 2**stage_delta across


@dataclass(frozen=True)
class ArchSpec:
    """Complete serialized architecture: wiring, channel plan, descriptors."""

    dag: Dag
    plan: ChannelPlan
    nodes: tuple[NodeDesc, ...]
    edges: tuple[EdgeDesc, ...]
    predicted_params: int
    train: Mapping[str, Any]
    meta: Mapping[str, Any]


def export_archspec(d: Dag, plan: ChannelPlan,
                    meta: Optional[Mapping[str, Any]] = None) -> ArchSpec:
    """Emit the full descriptor set for a staged DAG under a channel plan."""
    if d.stages is None:
        raise InvalidGraphError("spec export needs assigned stages")
    report = validate_dag(d)
    if not report.ok:
        raise InvalidGraphError(f"refusing to export an invalid DAG: {report.violations[0].detail}")
    st = d.stages
    nodes = tuple(
        NodeDesc(v, NODE_STEM if v == 0 else NODE_HEAD if v == d.n - 1 else NODE_RESIDUAL, st[v])
        for v in range(d.n)
    )
    edges = tuple(EdgeDesc(u, v, 1 << (st[v] - st[u])) for u, v in d.edges)
    return ArchSpec(
        dag=d,
        plan=plan,
        nodes=nodes,
        edges=edges,
        predicted_params=param_count(d, plan),
        train=dict(TRAIN_META),
        meta=dict(meta or {}),
    )


def archspec_to_dict(spec: ArchSpec) -> dict:
    return {
        "graph": graph_to_dict(spec.dag, spec.meta),
        "channels": {"C": spec.plan.base, "stages": list(spec.plan.stage_channels)},
        "num_classes": spec.plan.num_classes,
        "input_channels": spec.plan.input_channels,
        "nodes": [{"id": nd.id, "kind": nd.kind, "stage": nd.stage} for nd in spec.nodes],
        "edges": [{"src": ed.src, "dst": ed.dst, "stride": ed.stride} for ed in spec.edges],
        "predicted_params": spec.predicted_params,
        "train": dict(spec.train),
    }


def archspec_from_dict(doc: Mapping[str, Any]) -> ArchSpec:
    try:
        graph, meta = graph_from_dict(doc["graph"])
        if not isinstance(graph, Dag):
            raise DataError("arch spec graph must be a staged DAG")
        plan = ChannelPlan(int(doc["channels"]["C"]),
                           int(doc.get("num_classes", 10)),
                           int(doc.get("input_channels", 3)))
        nodes = tuple(NodeDesc(int(x["id"]), str(x["kind"]), int(x["stage"]))
                      for x in doc["nodes"])
        edges = tuple(EdgeDesc(int(x["src"]), int(x["dst"]), int(x["stride"]))
                      for x in doc["edges"])
        predicted = int(doc["predicted_params"])
        train = dict(doc["train"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed arch spec: {exc}") from exc
    return ArchSpec(graph, plan, nodes, edges, predicted, train, meta)


def write_archspec(path: Union[str, os.PathLike], spec: ArchSpec) -> None:
    write_json_atomic(path, archspec_to_dict(spec))


def read_archspec(path: Union[str, os.PathLike]) -> ArchSpec:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read arch spec {path}: {exc}") from exc
    return archspec_from_dict(doc)


def archspec_json(spec: ArchSpec) -> str:
    return dumps_json(archspec_to_dict(spec))


def recount_params(spec: ArchSpec) -> int:
    """Independent parameter recount from the descriptor lists.

    Walks edges before nodes and in reverse order so a bookkeeping slip in
    either traversal cannot cancel out.
    """
    plan = spec.plan
    indeg = {nd.id: 0 for nd in spec.nodes}
    total = 0
    for ed in reversed(spec.edges):
        indeg[ed.dst] += 1
        if ed.stride > 1:
            src_c = plan.channels(spec.dag.stages[ed.src])
            dst_c = plan.channels(spec.dag.stages[ed.dst])
            total += 9 * src_c * dst_c + 2 * dst_c
    for nd in reversed(spec.nodes):
        if nd.kind == NODE_STEM:
            total += 9 * plan.input_channels * plan.base + 2 * plan.base
        elif nd.kind == NODE_HEAD:
            total += indeg[nd.id] + plan.channels(nd.stage) * plan.num_classes + plan.num_classes
        else:
            c = plan.channels(nd.stage)
            total += indeg[nd.id] + 10 * c * c + 2 * c
    return total
