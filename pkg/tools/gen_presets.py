#!/usr/bin/env python3
"""Regenerate src/graphforge/data/presets.json (the declarative batch grids)."""

import json
import os


def fnum(x):
    return int(x) if float(x).is_integer() else x


def er_configs(pairs):
    return [{"family": "er", "params": {"n": n, "p": p}} for n, ps in pairs for p in ps]


def ba_configs(pairs):
    return [{"family": "ba", "params": {"n": n, "m": m}} for n, ms in pairs for m in ms]


def ws_configs(ns, ks, ps):
    return [{"family": "ws", "params": {"n": n, "k": k, "p": p}}
            for n in ns for k in ks for p in ps]


def rdag_configs(n, fs, nouts, bs):
    return [{"family": "rdag", "params": {"n": n, "n_out": o, "f": f, "b": b, "alpha": 0.5}}
            for f in fs for o in nouts for b in bs]


def composite_configs(ns, ps):
    return [{"family": "composite", "params": {"n": n, "p_init": p, "budget": 2000}}
            for n in ns for p in ps]


def fmri_configs(pairs):
    return [{"family": "fmri", "params": {"n": n, "t": t}} for n, ts in pairs for t in ts]


def bottleneck_of(cfg):
    return {"family": "bottleneck", "params": {"base_family": cfg["family"], **cfg["params"]}}


WS_P = [0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75, 0.8, 1.0]


def cifar10_configs():
    out = []
    out += ba_configs([(30, [2, 3, 5, 7, 11]), (60, [2, 3, 5, 7, 11])])
    out += composite_configs([30, 60], [0.85, 0.99])
    out += er_configs([(30, [0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0]),
                       (60, [0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0])])
    out += fmri_configs([(30, [2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 4.9]),
                         (60, [2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0])])
    out += rdag_configs(30, ["exp2", "exp3", "pow1", "one"], [2, 3, 4, 5], [5])
    out += [{"family": "rdag",
             "params": {"n": 30, "n_out": "laplace", "f": "exp3", "b": 5, "alpha": 0.5}}]
    out += [{"family": "rdag",
             "params": {"n": 30, "n_out": "hub", "f": "exp3", "b": 5, "alpha": 0.5, "variant": v}}
            for v in (0, 1)]
    out += rdag_configs(60, ["exp2", "exp3", "pow1"], [2, 3, 4, 5], [5, 10])
    out += ws_configs([30, 60], [2, 4, 6, 8], WS_P)
    # bottleneck ablations: short-range rdags, all composites, all full DAGs
    out += [bottleneck_of(c) for c in rdag_configs(30, ["exp2", "exp3"], [2, 3, 4, 5], [5])]
    out += [bottleneck_of(c) for c in rdag_configs(60, ["exp2", "exp3"], [2, 3, 4, 5], [5, 10])]
    out += [bottleneck_of(c) for c in composite_configs([30, 60], [0.85, 0.99])]
    out += [bottleneck_of(c) for c in er_configs([(30, [1.0]), (60, [1.0])])]
    return out


def cifar100_configs():
    out = []
    out += ba_configs([(60, [2, 3, 5, 7, 11])])
    out += composite_configs([60], [0.85, 0.99])
    out += er_configs([(60, [0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0])])
    out += fmri_configs([(60, [2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0])])
    out += rdag_configs(60, ["exp2", "exp3", "pow1"], [2, 3, 4, 5], [5, 10])
    out += ws_configs([60], [2, 4, 6, 8], WS_P)
    return out


def smoke_configs():
    return [
        {"family": "er", "params": {"n": 30, "p": 0.2}},
        {"family": "ba", "params": {"n": 30, "m": 3}},
        {"family": "ws", "params": {"n": 30, "k": 4, "p": 0.25}},
        {"family": "rdag", "params": {"n": 30, "n_out": 3, "f": "exp3", "b": 5, "alpha": 0.5}},
        {"family": "composite", "params": {"n": 30, "p_init": 0.85, "budget": 200}},
        {"family": "bottleneck",
         "params": {"base_family": "rdag", "n": 30, "n_out": 3, "f": "exp3", "b": 5, "alpha": 0.5}},
    ]


def main():
    presets = {
        "paper-cifar10": {"num_classes": 10, "versions": 5, "configs": cifar10_configs()},
        "paper-cifar100": {"num_classes": 100, "versions": 5, "configs": cifar100_configs()},
        "smoke": {"num_classes": 10, "versions": 1, "configs": smoke_configs()},
    }
    for name, spec in presets.items():
        print(f"{name}: {len(spec['configs'])} configs x {spec['versions']} seeds "
              f"= {len(spec['configs']) * spec['versions']} entries")
    dest = os.path.join(os.path.dirname(__file__), "..", "src", "graphforge", "data",
                        "presets.json")
    os.makedirs(os.path.dirname(dest), exist_ok=True)
    with open(dest, "w") as fh:
        json.dump(presets, fh, indent=2)
        fh.write("\n")
    print("wrote", os.path.normpath(dest))


if __name__ == "__main__":
    main()
