import json

import pytest
import torch

from gftrainer import (ParamMismatchError, SpecError, build_network, load_spec,
                       parse_spec)

TRAIN_BLOCK = {"epochs": 100, "batch": 128, "lr": 0.1, "momentum": 0.9,
               "weight_decay": 1e-4, "lr_drops": [80, 90]}


def make_spec_doc(n, edges, stages, c, predicted, num_classes=10):
    kinds = {0: "stem", n - 1: "head"}
    return {
        "graph": {"n": n, "edges": [list(e) for e in edges], "stages": list(stages),
                  "meta": {"family": "test", "params": {}, "seed": 0}},
        "channels": {"C": c, "stages": [c, 2 * c, 4 * c]},
        "num_classes": num_classes,
        "input_channels": 3,
        "nodes": [{"id": v, "kind": kinds.get(v, "node"), "stage": stages[v]}
                  for v in range(n)],
        "edges": [{"src": u, "dst": v, "stride": 1 << (stages[v] - stages[u])}
                  for u, v in edges],
        "predicted_params": predicted,
        "train": dict(TRAIN_BLOCK),
    }


def test_chain3_parameter_exactness(chain3_spec):
    spec = load_spec(chain3_spec)
    net = build_network(spec)
    assert spec.predicted_params == 859_827  # 130 C^2 + 85 C + 12 at C=81
    assert net.actual_params() == spec.predicted_params


def test_forward_shape_contract(chain3_spec):
    net = build_network(load_spec(chain3_spec))
    net.eval()
    logits = net(torch.randn(2, 3, 32, 32))
    assert logits.shape == (2, 10)


def test_parameter_exactness_across_families(family_specs):
    assert len(family_specs) >= 20
    for path in family_specs:
        spec = load_spec(path)
        net = build_network(spec)  # raises on any mismatch
        assert net.actual_params() == spec.predicted_params, path


def test_mismatched_prediction_raises_with_breakdown():
    # hand-counted: stem 116, node1 169, node2 658, head 172,
    # edges (0,2)=304, (1,2)=304, (1,3)=608, (2,3)=1184 -> 3515 at C=4
    edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
    doc = make_spec_doc(4, edges, (0, 0, 1, 2), 4, predicted=3515)
    build_network(parse_spec(doc))  # exact

    doc_bad = dict(doc, predicted_params=3514)
    with pytest.raises(ParamMismatchError) as exc:
        build_network(parse_spec(doc_bad))
    assert "3515" in str(exc.value) and "3514" in str(exc.value)


def test_zeroed_aggregation_weight_equals_edge_ablation():
    edges_full = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
    edges_cut = [(0, 1), (0, 2), (1, 2), (2, 3)]
    stages = (0, 0, 1, 2)
    full = build_network(parse_spec(make_spec_doc(4, edges_full, stages, 4, 3515)))
    cut = build_network(parse_spec(make_spec_doc(4, edges_cut, stages, 4, 2906)))
    # share every weight the ablated net still has
    state = {k: v for k, v in full.state_dict().items() if k in cut.state_dict()}
    missing, unexpected = cut.load_state_dict(state, strict=False)
    assert not missing and not unexpected
    with torch.no_grad():
        full.agg_weights["3"]["1"].zero_()
    full.eval()
    cut.eval()
    x = torch.randn(3, 3, 32, 32, generator=torch.Generator().manual_seed(5))
    assert torch.allclose(full(x), cut(x), atol=1e-6)


def test_gradient_reaches_every_parameter(family_specs, chain3_spec):
    torch.manual_seed(0)
    for path in [chain3_spec, family_specs[0], family_specs[11]]:
        net = build_network(load_spec(path))
        net.train()
        x = torch.randn(8, 3, 32, 32)
        y = torch.randint(0, net.spec.num_classes, (8,))
        loss = torch.nn.functional.cross_entropy(net(x), y)
        loss.backward()
        for name, p in net.named_parameters():
            assert p.grad is not None, name
            assert bool((p.grad != 0).any()), f"dead parameter tensor: {name}"
            if name.startswith("agg_weights."):
                assert float(p.grad.abs()) > 0, f"dead aggregation scalar: {name}"


def test_eval_forward_deterministic(chain3_spec):
    torch.manual_seed(3)
    net = build_network(load_spec(chain3_spec))
    net.eval()
    x = torch.randn(2, 3, 32, 32, generator=torch.Generator().manual_seed(9))
    assert torch.equal(net(x), net(x))


def test_spec_validation_rejects_bad_documents():
    edges = [(0, 1), (1, 2)]
    good = make_spec_doc(3, edges, (0, 1, 2), 2, predicted=0)
    good["predicted_params"] = 130 * 4 + 85 * 2 + 12
    parse_spec(good)

    bad_stride = json.loads(json.dumps(good))
    bad_stride["edges"][0]["stride"] = 1
    with pytest.raises(SpecError):
        parse_spec(bad_stride)

    bad_channels = json.loads(json.dumps(good))
    bad_channels["channels"]["stages"] = [2, 4, 6]
    with pytest.raises(SpecError):
        parse_spec(bad_channels)

    orphaned = make_spec_doc(4, [(0, 1), (1, 3), (0, 3)], (0, 1, 1, 2), 2, 0)
    with pytest.raises(SpecError):
        parse_spec(orphaned)
