"""Command-line front end.

Subcommands: gen, dagify, analyze, ablate, export, batch, presets.
Exit codes: 0 success, 1 usage error, 2 data error, 3 partial batch failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import Optional

from . import __version__
from .arch import (DEFAULT_TARGET_PARAMS, assign_stages, bottleneck_ablation,
                   export_archspec, solve_channels, write_archspec)
from .batch import generate_family, resolve_threads, run_batch
from .core import Dag, GraphForgeError, UndirectedGraph, read_graph, write_graph
from .features import EXTRA_COLUMNS, FEATURE_COLUMNS, analyze_dag, schema
from .generators import load_fmri_matrix
from .layout import ORDERING_METHODS, dagify, dagify_embedded, largest_component
from .presets import build_manifest, load_presets

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3

FAMILIES = ("er", "ba", "ws", "rdag", "composite", "fmri")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphforge",
                     description="Random-graph wiring toolkit: generate, dagify, "
                                 "analyze, ablate, export, batch.")
    parser.add_argument("--version", action="version", version=f"graphforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate one graph and write it as JSON")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--nodes", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--p", type=float, help="edge probability (er) / rewiring probability (ws)")
    p.add_argument("--m", type=int, help="attachment count (ba)")
    p.add_argument("--k", type=int, help="ring neighbor count (ws)")
    p.add_argument("--n-out", help="rdag out-degree: integer, 'laplace' or 'hub'")
    p.add_argument("--f", default="exp3", help="rdag weighting tag: exp<C>, pow1 or one")
    p.add_argument("--b", type=int, default=5, help="rdag local neighborhood size")
    p.add_argument("--alpha", type=float, default=0.5, help="rdag attachment exponent")
    p.add_argument("--variant", type=int, help="rdag hub-placement variant index")
    p.add_argument("--p-init", type=float, help="initial er density (composite)")
    p.add_argument("--budget", type=int, default=2000, help="composite search iterations")
    p.add_argument("--fmri-matrix", help="CSV partial-correlation matrix (fmri)")
    p.add_argument("--threshold", type=float, help="binarization threshold (fmri)")

    p = sub.add_parser("dagify", help="orient an undirected graph file into a staged DAG")
    p.add_argument("--graph", required=True)
    p.add_argument("--ordering", default="x", choices=ORDERING_METHODS)
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="compute the feature vector of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--ordering", default="x", choices=ORDERING_METHODS,
                   help="ordering used when the input still needs dagifying")
    p.add_argument("--features-out", required=True)
    p.add_argument("--embedding-out", help="optional CSV dump: node,x,y,stress")

    p = sub.add_parser("ablate", help="replace stage crossings by single gateways")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("export", help="solve the channel budget and write an arch spec")
    p.add_argument("--graph", required=True)
    p.add_argument("--ordering", default="x", choices=ORDERING_METHODS)
    p.add_argument("--target-params", type=int, default=DEFAULT_TARGET_PARAMS)
    p.add_argument("--num-classes", type=int, default=10)
    p.add_argument("--input-channels", type=int, default=3)
    p.add_argument("--out", required=True)

    p = sub.add_parser("batch", help="run a whole preset grid deterministically")
    p.add_argument("--preset", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--root-seed", required=True, type=int)
    p.add_argument("--target-params", type=int, default=DEFAULT_TARGET_PARAMS)
    p.add_argument("--threads", type=int, help="worker count (default: GRAPHFORGE_THREADS or all cores)")
    p.add_argument("--fmri-matrix-30", help="matrix CSV for 30-node fmri entries")
    p.add_argument("--fmri-matrix-60", help="matrix CSV for 60-node fmri entries")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("presets", help="list available batch presets")
    p.add_argument("--json", action="store_true", dest="as_json")
    return parser


def _gen_params(args) -> dict:
    need = {
        "er": ("p",), "ba": ("m",), "ws": ("k", "p"),
        "rdag": ("n_out",), "composite": ("p_init",), "fmri": ("fmri_matrix", "threshold"),
    }[args.family]
    missing = [flag for flag in need if getattr(args, flag) is None]
    if missing:
        flags = ", ".join("--" + f.replace("_", "-") for f in missing)
        raise UsageError(f"family {args.family!r} requires {flags}")
    if args.family == "er":
        return {"n": args.nodes, "p": args.p}
    if args.family == "ba":
        return {"n": args.nodes, "m": args.m}
    if args.family == "ws":
        return {"n": args.nodes, "k": args.k, "p": args.p}
    if args.family == "rdag":
        n_out = args.n_out if args.n_out in ("laplace", "hub") else int(args.n_out)
        params = {"n": args.nodes, "n_out": n_out, "f": args.f, "b": args.b,
                  "alpha": args.alpha}
        if args.variant is not None:
            params["variant"] = args.variant
        return params
    if args.family == "composite":
        return {"n": args.nodes, "p_init": args.p_init, "budget": args.budget}
    return {"n": args.nodes, "t": args.threshold}


class UsageError(Exception):
    pass


def _load_dag(path: str, ordering: str):
    """Read a graph file; dagify and stage it if it is not a staged DAG yet.

    Returns (dag, meta, embedding); the embedding is only present when the
    input was undirected and the ordering layout is still at hand.
    """
    graph, meta = read_graph(path)
    if isinstance(graph, UndirectedGraph):
        graph = largest_component(graph)
        dag, emb = dagify_embedded(graph, ordering)
        dag = assign_stages(dag)
        meta["params"] = {**meta.get("params", {}), "ordering": ordering}
        return dag, meta, emb
    return graph, meta, None


def cmd_gen(args) -> int:
    params = _gen_params(args)
    fmri_matrices = None
    if args.family == "fmri":
        fmri_matrices = {args.nodes: load_fmri_matrix(args.fmri_matrix)}
    graph = generate_family(args.family, params, args.seed, fmri_matrices)
    if isinstance(graph, Dag):
        graph = assign_stages(graph)
    write_graph(args.out, graph, {"family": args.family, "params": params, "seed": args.seed})
    print(f"wrote {args.out} (n={graph.n}, m={graph.num_edges})")
    return EXIT_OK


def cmd_dagify(args) -> int:
    graph, meta = read_graph(args.graph)
    if isinstance(graph, Dag):
        raise GraphForgeError(f"{args.graph} already contains a DAG")
    graph = largest_component(graph)
    dag = assign_stages(dagify(graph, args.ordering))
    meta["params"] = {**meta.get("params", {}), "ordering": args.ordering}
    write_graph(args.out, dag, meta)
    print(f"wrote {args.out} (n={dag.n}, m={dag.num_edges})")
    return EXIT_OK


def cmd_analyze(args) -> int:
    dag, meta, pipeline_emb = _load_dag(args.graph, args.ordering)
    fv, extras, emb = analyze_dag(dag, pipeline_emb)
    columns = ["name", "family", "seed"] + list(FEATURE_COLUMNS) + list(EXTRA_COLUMNS)
    row = {"name": meta.get("family") or "graph", "family": meta.get("family"),
           "seed": meta.get("seed")}
    row.update(fv.values)
    row.update(extras)
    with open(args.features_out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerow([row[c] for c in columns])
    with open(args.features_out + ".schema.json", "w") as fh:
        json.dump(schema(), fh, indent=2)
        fh.write("\n")
    if args.embedding_out:
        with open(args.embedding_out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["node", "x", "y", "stress"])
            for i in range(emb.n):
                writer.writerow([i, emb.coords[i, 0], emb.coords[i, 1], emb.stress])
    print(f"wrote {args.features_out}")
    return EXIT_OK


def cmd_ablate(args) -> int:
    graph, meta = read_graph(args.graph)
    if not isinstance(graph, Dag):
        raise GraphForgeError("ablation needs a staged DAG file; run dagify first")
    out = bottleneck_ablation(graph)
    meta["params"] = {**meta.get("params", {}), "ablation": "bottleneck"}
    write_graph(args.out, out, meta)
    print(f"wrote {args.out} (crossing edges reduced to stage gateways)")
    return EXIT_OK


def cmd_export(args) -> int:
    dag, meta, _ = _load_dag(args.graph, args.ordering)
    plan = solve_channels(dag, args.target_params, num_classes=args.num_classes,
                          input_channels=args.input_channels)
    spec = export_archspec(dag, plan, meta)
    write_archspec(args.out, spec)
    print(f"wrote {args.out} (C={plan.base}, predicted_params={spec.predicted_params})")
    return EXIT_OK


def cmd_batch(args) -> int:
    manifest = build_manifest(args.preset, args.root_seed)
    matrices = {}
    if args.fmri_matrix_30:
        matrices[30] = load_fmri_matrix(args.fmri_matrix_30)
    if args.fmri_matrix_60:
        matrices[60] = load_fmri_matrix(args.fmri_matrix_60)
    started = time.time()
    done = [0]

    def progress(res):
        done[0] += 1
        if not args.quiet and (done[0] % 25 == 0 or done[0] == len(manifest.entries)):
            print(f"  {done[0]}/{len(manifest.entries)} entries "
                  f"({time.time() - started:.0f}s)", flush=True)

    summary = run_batch(manifest, args.out_dir, fmri_matrices=matrices or None,
                        threads=args.threads, target_params=args.target_params,
                        progress=progress)
    print(f"batch {args.preset}: {summary.succeeded}/{summary.total} entries succeeded "
          f"in {time.time() - started:.0f}s (workers={resolve_threads(args.threads)})")
    for name, err in summary.failures:
        print(f"  FAILED {name}: {err}", file=sys.stderr)
    return EXIT_OK if summary.ok else EXIT_PARTIAL


def cmd_presets(args) -> int:
    presets = load_presets()
    if args.as_json:
        print(json.dumps(presets, indent=2))
        return EXIT_OK
    for name in sorted(presets):
        spec = presets[name]
        total = len(spec["configs"]) * int(spec.get("versions", 5))
        print(f"{name}: {total} entries "
              f"({len(spec['configs'])} configs x {spec.get('versions', 5)} seeds, "
              f"{spec.get('num_classes', 10)} classes)")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "dagify": cmd_dagify,
    "analyze": cmd_analyze,
    "ablate": cmd_ablate,
    "export": cmd_export,
    "batch": cmd_batch,
    "presets": cmd_presets,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"graphforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphForgeError, OSError, ValueError) as exc:
        print(f"graphforge: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
