"""Batch execution: generate, dagify, analyze, and export whole manifests.

Every entry is an independent pure task keyed by its derived seed, so the
worker-pool size (``GRAPHFORGE_THREADS``) changes wall time but never a
single output byte.  Graph and spec files are written atomically; feature
rows are aggregated into name-sorted CSVs after all entries finish.
"""

from __future__ import annotations

import csv
import io
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping, Optional

import numpy as np

from . import generators as gen
from .arch import (DEFAULT_TARGET_PARAMS, assign_stages, bottleneck_ablation,
                   export_archspec, solve_channels, write_archspec)
from .core import GraphForgeError, RngSpec, UndirectedGraph, write_graph, write_json_atomic
from .features import EXTRA_COLUMNS, FEATURE_COLUMNS, analyze_dag, scale_rows, schema
from .layout import dagify_embedded, largest_component
from .presets import BatchEntry, BatchManifest, rng_stream

ID_COLUMNS = ("name", "family", "seed")


@dataclass(frozen=True)
class EntryResult:
    name: str
    ok: bool
    row: Optional[dict[str, Any]] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class BatchSummary:
    total: int
    succeeded: int
    failures: tuple[tuple[str, str], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def generate_family(family: str, params: Mapping[str, Any], seed: int,
                    fmri_matrices: Optional[Mapping[int, np.ndarray]] = None):
    """Dispatch to the family generator; returns an UndirectedGraph or Dag."""
    p = dict(params)
    p.pop("variant", None)
    rng = RngSpec(seed, rng_stream(family, params))
    n = int(p["n"])
    if family == "er":
        return gen.gen_er(n, float(p["p"]), rng)
    if family == "ba":
        return gen.gen_ba(n, int(p["m"]), rng)
    if family == "ws":
        return gen.gen_ws(n, int(p["k"]), float(p["p"]), rng)
    if family == "rdag":
        n_out = p["n_out"]
        if not isinstance(n_out, str):
            n_out = int(n_out)
        return gen.gen_rdag(
            gen.RdagParams(n, n_out, str(p.get("f", "exp3")), int(p.get("b", 5)),
                           float(p.get("alpha", 0.5))), rng)
    if family == "composite":
        return gen.gen_composite(n, float(p["p_init"]), int(p.get("budget", 2000)), rng)
    if family == "fmri":
        matrices = fmri_matrices or {}
        if n not in matrices:
            raise GraphForgeError(
                f"fmri entry needs a partial-correlation matrix for n={n}; "
                f"pass --fmri-matrix-{n}")
        return gen.gen_fmri(gen.FmriParams(matrices[n], float(p["t"]), n), rng)
    raise GraphForgeError(f"unknown family {family!r}")


def entry_dag(entry: BatchEntry,
              fmri_matrices: Optional[Mapping[int, np.ndarray]] = None):
    """Generate an entry's staged DAG plus the ordering embedding, if any.

    Undirected families keep the embedding that fixed their node order so
    shape statistics reuse it; directly-built DAGs and ablations (whose
    edge set no longer matches any construction-time layout) return None
    and are embedded at analysis time.
    """
    params = dict(entry.params)
    if entry.family == "bottleneck":
        base_family = params.pop("base_family")
        graph = generate_family(base_family, params, entry.seed, fmri_matrices)
        dag, _ = _to_staged_dag(graph)
        return bottleneck_ablation(dag), None
    graph = generate_family(entry.family, params, entry.seed, fmri_matrices)
    return _to_staged_dag(graph)


def _to_staged_dag(graph):
    emb = None
    if isinstance(graph, UndirectedGraph):
        graph = largest_component(graph)
        dag, emb = dagify_embedded(graph, "x")
    else:
        dag = graph
    return (dag if dag.stages is not None else assign_stages(dag)), emb


def process_entry(entry: BatchEntry, out_dir: str,
                  fmri_matrices: Optional[Mapping[int, np.ndarray]],
                  target_params: int, num_classes: int) -> EntryResult:
    try:
        dag, emb = entry_dag(entry, fmri_matrices)
        meta = {"family": entry.family, "params": dict(entry.params), "seed": entry.seed}
        write_graph(os.path.join(out_dir, "graphs", f"{entry.name}.json"), dag, meta)
        fv, extras, _ = analyze_dag(dag, emb)
        plan = solve_channels(dag, target_params, num_classes=num_classes)
        spec = export_archspec(dag, plan, meta)
        write_archspec(os.path.join(out_dir, "specs", f"{entry.name}.json"), spec)
        row: dict[str, Any] = {
            "name": entry.name, "family": entry.family, "seed": entry.seed,
        }
        row.update(fv.values)
        row.update(extras)
        return EntryResult(entry.name, True, row=row)
    except Exception as exc:  # per-entry isolation: the batch continues
        detail = "".join(traceback.format_exception_only(type(exc), exc)).strip()
        return EntryResult(entry.name, False, error=detail)


def _csv_bytes(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def _write_text_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def resolve_threads(explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("GRAPHFORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_batch(manifest: BatchManifest, out_dir: str, *,
              fmri_matrices: Optional[Mapping[int, np.ndarray]] = None,
              threads: Optional[int] = None,
              target_params: int = DEFAULT_TARGET_PARAMS,
              progress=None) -> BatchSummary:
    """Run every manifest entry; failures are recorded, not fatal.

    Produces graphs/<name>.json and specs/<name>.json per entry plus
    features.csv, features_scaled.csv and features_schema.json.
    Re-running with the same root seed is byte-identical.
    """
    os.makedirs(os.path.join(out_dir, "graphs"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "specs"), exist_ok=True)
    workers = resolve_threads(threads)
    jobs = [(e, out_dir, fmri_matrices, target_params, manifest.num_classes)
            for e in manifest.entries]
    results: list[EntryResult] = []
    if workers == 1:
        for job in jobs:
            results.append(process_entry(*job))
            if progress:
                progress(results[-1])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_process_star, jobs, chunksize=4):
                results.append(res)
                if progress:
                    progress(res)

    ok_rows = sorted((r.row for r in results if r.ok), key=lambda r: r["name"])
    columns = list(ID_COLUMNS) + list(FEATURE_COLUMNS) + list(EXTRA_COLUMNS)
    _write_text_atomic(os.path.join(out_dir, "features.csv"), _csv_bytes(columns, ok_rows))
    if len(ok_rows) >= 2:
        value_cols = list(FEATURE_COLUMNS) + list(EXTRA_COLUMNS)
        scaled_vals = scale_rows([{c: r[c] for c in value_cols} for r in ok_rows])
        scaled_rows = [
            {**{c: r[c] for c in ID_COLUMNS}, **sv} for r, sv in zip(ok_rows, scaled_vals)
        ]
        _write_text_atomic(os.path.join(out_dir, "features_scaled.csv"),
                           _csv_bytes(columns, scaled_rows))
    write_json_atomic(os.path.join(out_dir, "features_schema.json"), schema())

    failures = tuple((r.name, r.error or "") for r in sorted(results, key=lambda r: r.name)
                     if not r.ok)
    return BatchSummary(len(results), len(ok_rows), failures)


def _process_star(job):
    return process_entry(*job)
