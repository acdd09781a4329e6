"""Build a runnable convolutional network from an arch spec.

Node semantics: the stem is a 3x3 conv (image channels to the base width)
plus batch-norm; every interior node aggregates its inputs with one learned
scalar per ingoing edge, applies ReLU - 3x3 conv - batch-norm, and adds a
1x1-projection residual taken from the aggregate; stage-crossing edges run
ReLU - strided 3x3 conv - batch-norm; the head pools its weighted sum and
applies a dense classifier.  Convolutions carry no biases (batch-norm owns
the affine terms) and the residual projection has no normalization, which
makes the parameter count exactly reproducible from the spec.
"""

from __future__ import annotations

import torch
from torch import nn

from .spec import ArchSpec, NodeSpec


class ParamMismatchError(RuntimeError):
    """Built parameter count disagrees with the spec prediction."""

    def __init__(self, actual: int, predicted: int, diff: list[str]):
        lines = "\n".join(diff)
        super().__init__(
            f"actual_params={actual} != predicted_params={predicted}\n"
            f"per-component breakdown (actual vs expected):\n{lines}")
        self.actual = actual
        self.predicted = predicted


def _conv_block(c_in: int, c_out: int, stride: int) -> nn.Sequential:
    # node outputs fan out to several consumers, so no in-place activations
    return nn.Sequential(
        nn.ReLU(inplace=False),
        nn.Conv2d(c_in, c_out, kernel_size=3, stride=stride, padding=1, bias=False),
        nn.BatchNorm2d(c_out),
    )


class GraphNetwork(nn.Module):
    """Feed-forward executor of a wiring spec, node by node in index order."""

    def __init__(self, spec: ArchSpec):
        super().__init__()
        self.spec = spec
        ch = spec.channels_of
        self.stem = nn.Sequential(
            nn.Conv2d(spec.input_channels, spec.base_channels, kernel_size=3,
                      padding=1, bias=False),
            nn.BatchNorm2d(spec.base_channels),
        )
        self.edge_ops = nn.ModuleDict()
        for e in spec.edges:
            if e.stride > 1:
                c_in = ch(spec.nodes[e.src].stage)
                c_out = ch(spec.nodes[e.dst].stage)
                self.edge_ops[f"{e.src}->{e.dst}"] = _conv_block(c_in, c_out, e.stride)
        self.agg_weights = nn.ModuleDict()
        self.node_ops = nn.ModuleDict()
        self.projections = nn.ModuleDict()
        for nd in spec.nodes[1:]:
            weights = nn.ParameterDict({
                str(e.src): nn.Parameter(torch.ones(()))  # neutral sum at start
                for e in spec.in_edges(nd.id)
            })
            self.agg_weights[str(nd.id)] = weights
            if nd.kind == "node":
                c = ch(nd.stage)
                self.node_ops[str(nd.id)] = _conv_block(c, c, 1)
                self.projections[str(nd.id)] = nn.Conv2d(c, c, kernel_size=1, bias=False)
        head_c = ch(spec.nodes[-1].stage)
        self.classifier = nn.Linear(head_c, spec.num_classes, bias=True)
        self.verify_params()

    def aggregate(self, node: NodeSpec, outputs: dict[int, torch.Tensor]) -> torch.Tensor:
        weights = self.agg_weights[str(node.id)]
        total = None
        for e in self.spec.in_edges(node.id):
            x = outputs[e.src]
            if e.stride > 1:
                x = self.edge_ops[f"{e.src}->{e.dst}"](x)
            x = weights[str(e.src)] * x
            total = x if total is None else total + x
        return total

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        outputs: dict[int, torch.Tensor] = {0: self.stem(images)}
        for nd in self.spec.nodes[1:]:
            agg = self.aggregate(nd, outputs)
            if nd.kind == "head":
                pooled = agg.mean(dim=(2, 3))
                return self.classifier(pooled)
            out = self.node_ops[str(nd.id)](agg) + self.projections[str(nd.id)](agg)
            outputs[nd.id] = out
        raise AssertionError("spec has no head node")

    # --- parameter accounting ---

    def actual_params(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def _expected_components(self) -> list[tuple[str, int]]:
        spec = self.spec
        ch = spec.channels_of
        out = [("stem", 9 * spec.input_channels * spec.base_channels
                + 2 * spec.base_channels)]
        for e in spec.edges:
            if e.stride > 1:
                c_in = ch(spec.nodes[e.src].stage)
                c_out = ch(spec.nodes[e.dst].stage)
                out.append((f"edge {e.src}->{e.dst}", 9 * c_in * c_out + 2 * c_out))
        for nd in spec.nodes[1:]:
            d = len(spec.in_edges(nd.id))
            if nd.kind == "head":
                out.append((f"head {nd.id}",
                            d + ch(nd.stage) * spec.num_classes + spec.num_classes))
            else:
                c = ch(nd.stage)
                out.append((f"node {nd.id}", d + 10 * c * c + 2 * c))
        return out

    def _actual_components(self) -> list[tuple[str, int]]:
        count = lambda m: sum(p.numel() for p in m.parameters())
        out = [("stem", count(self.stem))]
        for key, mod in self.edge_ops.items():
            out.append((f"edge {key}", count(mod)))
        for nd in self.spec.nodes[1:]:
            nid = str(nd.id)
            total = count(self.agg_weights[nid])
            if nd.kind == "head":
                total += count(self.classifier)
                out.append((f"head {nd.id}", total))
            else:
                total += count(self.node_ops[nid]) + count(self.projections[nid])
                out.append((f"node {nd.id}", total))
        return out

    def verify_params(self) -> int:
        actual = self.actual_params()
        if actual != self.spec.predicted_params:
            expected = dict(self._expected_components())
            got = dict(self._actual_components())
            diff = [f"  {name}: {got.get(name, 0)} vs {expected.get(name, 0)}"
                    for name in sorted(set(expected) | set(got))
                    if got.get(name, 0) != expected.get(name, 0)]
            if not diff:
                diff = ["  (component sums agree; spec prediction itself is off)"]
            raise ParamMismatchError(actual, self.spec.predicted_params, diff)
        return actual


def build_network(spec: ArchSpec) -> GraphNetwork:
    """Construct the network and hard-verify its parameter count."""
    return GraphNetwork(spec)
