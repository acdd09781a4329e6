"""graphforge: random-graph families, DAG wiring pipeline, invariants, export."""

__version__ = "0.1.0"

from .arch import (ArchSpec, ChannelPlan, assign_stages, bottleneck_ablation,
                   export_archspec, param_count, read_archspec, solve_channels,
                   write_archspec)
from .core import (Dag, RngSpec, UndirectedGraph, ValidationReport, read_graph,
                   underlying_undirected, validate_dag, write_graph)
from .features import (FeatureVector, Q1dVerdict, analyze_dag, compute_features,
                       pca_elongation, q1d, scale_features)
from .generators import (FmriParams, RdagParams, gen_ba, gen_composite, gen_er,
                         gen_fmri, gen_rdag, gen_ws)
from .layout import (Embedding, dagify, fix_orphans, kamada_kawai, order_nodes,
                     orient_edges)
from .paths import PathStats, count_paths, depth, n_bottlenecks, width
from .presets import BatchManifest, build_manifest
from .batch import run_batch

__all__ = [
    "ArchSpec", "BatchManifest", "ChannelPlan", "Dag", "Embedding",
    "FeatureVector", "FmriParams", "PathStats", "Q1dVerdict", "RdagParams",
    "RngSpec", "UndirectedGraph", "ValidationReport", "analyze_dag",
    "assign_stages", "bottleneck_ablation", "build_manifest", "compute_features",
    "count_paths", "dagify", "depth", "export_archspec", "fix_orphans",
    "gen_ba", "gen_composite", "gen_er", "gen_fmri", "gen_rdag", "gen_ws",
    "kamada_kawai", "n_bottlenecks", "order_nodes", "orient_edges",
    "param_count", "pca_elongation", "q1d", "read_archspec", "read_graph",
    "run_batch", "scale_features", "solve_channels", "underlying_undirected",
    "validate_dag", "width", "write_archspec", "write_graph",
]
