"""Arch-spec JSON parsing.

The trainer consumes the spec file format only; it never imports the
producing toolkit.  Expected document shape:

    {"graph": {"n", "edges", "stages", "meta"},
     "channels": {"C": int, "stages": [c0, c1, c2]},
     "num_classes": int, "input_channels": int,
     "nodes": [{"id", "kind", "stage"}, ...],
     "edges": [{"src", "dst", "stride"}, ...],
     "predicted_params": int,
     "train": {"epochs", "batch", "lr", "momentum", "weight_decay", "lr_drops"}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping


class SpecError(ValueError):
    """The spec document is malformed or internally inconsistent."""


@dataclass(frozen=True)
class NodeSpec:
    id: int
    kind: str  # stem | node | head
    stage: int


@dataclass(frozen=True)
class EdgeSpec:
    src: int
    dst: int
    stride: int


@dataclass(frozen=True)
class ArchSpec:
    n: int
    base_channels: int
    stage_channels: tuple[int, int, int]
    num_classes: int
    input_channels: int
    nodes: tuple[NodeSpec, ...]
    edges: tuple[EdgeSpec, ...]
    predicted_params: int
    train: Mapping[str, Any]
    meta: Mapping[str, Any]

    def in_edges(self, node: int) -> list[EdgeSpec]:
        return sorted((e for e in self.edges if e.dst == node), key=lambda e: e.src)

    def channels_of(self, stage: int) -> int:
        return self.stage_channels[stage]


def parse_spec(doc: Mapping[str, Any]) -> ArchSpec:
    try:
        graph = doc["graph"]
        n = int(graph["n"])
        channels = doc["channels"]
        stage_channels = tuple(int(c) for c in channels["stages"])
        nodes = tuple(sorted((NodeSpec(int(x["id"]), str(x["kind"]), int(x["stage"]))
                              for x in doc["nodes"]), key=lambda nd: nd.id))
        edges = tuple(sorted((EdgeSpec(int(x["src"]), int(x["dst"]), int(x["stride"]))
                              for x in doc["edges"]), key=lambda e: (e.src, e.dst)))
        spec = ArchSpec(
            n=n,
            base_channels=int(channels["C"]),
            stage_channels=stage_channels,  # type: ignore[arg-type]
            num_classes=int(doc.get("num_classes", 10)),
            input_channels=int(doc.get("input_channels", 3)),
            nodes=nodes,
            edges=edges,
            predicted_params=int(doc["predicted_params"]),
            train=dict(doc["train"]),
            meta=dict(graph.get("meta") or {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed arch spec: {exc}") from exc
    _check(spec)
    return spec


def _check(spec: ArchSpec) -> None:
    if len(spec.stage_channels) != 3:
        raise SpecError("expected exactly three stage channel widths")
    if spec.stage_channels != (spec.base_channels, 2 * spec.base_channels,
                               4 * spec.base_channels):
        raise SpecError("stage channels must double from the base width")
    if [nd.id for nd in spec.nodes] != list(range(spec.n)):
        raise SpecError("node ids must be exactly 0..n-1")
    if spec.nodes[0].kind != "stem" or spec.nodes[-1].kind != "head":
        raise SpecError("node 0 must be the stem and node n-1 the head")
    for e in spec.edges:
        if not 0 <= e.src < e.dst < spec.n:
            raise SpecError(f"edge ({e.src},{e.dst}) must run forward")
        expected = 1 << (spec.nodes[e.dst].stage - spec.nodes[e.src].stage)
        if e.stride != expected:
            raise SpecError(f"edge ({e.src},{e.dst}) stride {e.stride} != 2^stage_delta")
    for nd in spec.nodes[1:]:
        if not spec.in_edges(nd.id):
            raise SpecError(f"node {nd.id} has no ingoing edge")


def load_spec(path) -> ArchSpec:
    with open(path) as fh:
        return parse_spec(json.load(fh))
