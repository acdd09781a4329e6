"""Batch presets: declarative parameter grids expanded into manifests.

The grids live in ``data/presets.json`` (preset name -> config list); a
manifest expands each config into seed versions with per-entry seeds
derived from the root seed and the entry name, so a batch is reproducible
regardless of execution order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

from .core import DataError, derive_seed


@dataclass(frozen=True)
class BatchEntry:
    name: str
    family: str
    params: Mapping[str, Any]
    seed: int


@dataclass(frozen=True)
class BatchManifest:
    preset: str
    root_seed: int
    num_classes: int
    entries: tuple[BatchEntry, ...]


def load_presets() -> dict:
    with resources.files("graphforge").joinpath("data/presets.json").open() as fh:
        return json.load(fh)


def preset_names() -> list[str]:
    return sorted(load_presets())


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def entry_name(family: str, params: Mapping[str, Any], version: int) -> str:
    """Stable slug unique per (family, params, version)."""
    p = dict(params)
    parts = [family]
    if family == "bottleneck":
        parts = ["bottleneck", str(p.pop("base_family"))]
    parts.append(f"n{p.pop('n')}")
    for key in sorted(p):
        if key == "alpha" or key == "budget":
            continue  # constant across the shipped grids
        val = p[key]
        label = {"n_out": "nout", "p_init": "p"}.get(key, key)
        parts.append(f"{label}{_fmt(val)}")
    parts.append(f"v{version}")
    return "_".join(parts)


def rng_stream(family: str, params: Mapping[str, Any]) -> str:
    """Stream label for generation; hub variants get distinct streams."""
    if "variant" in params:
        return f"{family}:v{params['variant']}"
    return family


def base_entry_name(name: str) -> str:
    """Name of the un-ablated entry behind a bottleneck entry."""
    if not name.startswith("bottleneck_"):
        raise ValueError(f"{name!r} is not a bottleneck entry")
    return name[len("bottleneck_"):]


def build_manifest(preset: str, root_seed: int) -> BatchManifest:
    """Expand a preset into seed versions with derived per-entry seeds.

    Bottleneck entries reuse the seed of the entry they ablate, so an
    ablation pair shares its underlying graph.
    """
    presets = load_presets()
    if preset not in presets:
        raise DataError(f"unknown preset {preset!r}; known: {', '.join(sorted(presets))}")
    spec = presets[preset]
    entries: list[BatchEntry] = []
    seen: set[tuple] = set()
    for cfg in spec["configs"]:
        family = cfg["family"]
        params = dict(cfg["params"])
        for version in range(int(spec.get("versions", 5))):
            name = entry_name(family, params, version)
            seed_name = base_entry_name(name) if family == "bottleneck" else name
            seed = derive_seed(root_seed, seed_name)
            key = (family, json.dumps(params, sort_keys=True), seed)
            if key in seen:
                raise DataError(f"duplicate manifest entry {name}")
            seen.add(key)
            entries.append(BatchEntry(name, family, params, seed))
    return BatchManifest(preset, root_seed, int(spec.get("num_classes", 10)), tuple(entries))
