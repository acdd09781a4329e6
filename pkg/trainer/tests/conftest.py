import json
import subprocess
from pathlib import Path

import numpy as np
import pytest

SPEC_TARGET = 853_000


def graphforge(*argv: str) -> None:
    proc = subprocess.run(["graphforge", *argv], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def write_chain3(path: Path) -> None:
    doc = {"n": 3, "edges": [[0, 1], [1, 2]], "stages": [0, 1, 2],
           "meta": {"family": "chain", "params": {}, "seed": 0}}
    path.write_text(json.dumps(doc))


@pytest.fixture(scope="session")
def chain3_spec(tmp_path_factory) -> Path:
    """The toy spec: stem -> one residual node -> head at the full budget."""
    root = tmp_path_factory.mktemp("chain3")
    graph = root / "chain.json"
    write_chain3(graph)
    spec = root / "chain_spec.json"
    graphforge("export", "--graph", str(graph), "--target-params", str(SPEC_TARGET),
               "--out", str(spec))
    return spec


@pytest.fixture(scope="session")
def family_specs(tmp_path_factory) -> list[Path]:
    """>= 20 arch specs spanning every family, produced via the CLI."""
    root = tmp_path_factory.mktemp("specs")
    matrix = root / "matrix.csv"
    rng = np.random.default_rng(12)
    m = rng.normal(0.0, 3.0, size=(50, 50))
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 0.0)
    np.savetxt(matrix, m, delimiter=",")

    gen_cases = [
        ("er", ["--p", "0.15"]), ("er", ["--p", "0.3"]), ("er", ["--p", "0.6"]),
        ("er", ["--p", "1.0"]),
        ("ba", ["--m", "2"]), ("ba", ["--m", "5"]), ("ba", ["--m", "11"]),
        ("ws", ["--k", "2", "--p", "0.25"]), ("ws", ["--k", "4", "--p", "0.0"]),
        ("ws", ["--k", "6", "--p", "0.75"]), ("ws", ["--k", "8", "--p", "0.5"]),
        ("rdag", ["--n-out", "2", "--f", "exp3"]),
        ("rdag", ["--n-out", "5", "--f", "exp2", "--b", "10"]),
        ("rdag", ["--n-out", "3", "--f", "pow1"]),
        ("rdag", ["--n-out", "laplace"]), ("rdag", ["--n-out", "hub"]),
        ("composite", ["--p-init", "0.9", "--budget", "60"]),
        ("composite", ["--p-init", "0.99", "--budget", "60"]),
        ("fmri", ["--fmri-matrix", str(matrix), "--threshold", "3.0"]),
        ("fmri", ["--fmri-matrix", str(matrix), "--threshold", "2.5"]),
    ]
    specs: list[Path] = []
    for i, (family, flags) in enumerate(gen_cases):
        graph = root / f"g{i}.json"
        spec = root / f"s{i}.json"
        nodes = "20" if family == "fmri" else "30"
        graphforge("gen", "--family", family, "--nodes", nodes, "--seed", str(100 + i),
                   "--out", str(graph), *flags)
        graphforge("export", "--graph", str(graph), "--target-params", str(SPEC_TARGET),
                   "--out", str(spec))
        specs.append(spec)
    # bottleneck ablations of two of the staged DAGs above
    for i, base in ((11, root / "g11.json"), (16, root / "g16.json")):
        ablated = root / f"g{i}_ablated.json"
        spec = root / f"s{i}_ablated.json"
        graphforge("ablate", "--graph", str(base), "--out", str(ablated))
        graphforge("export", "--graph", str(ablated), "--target-params",
                   str(SPEC_TARGET), "--out", str(spec))
        specs.append(spec)
    assert len(specs) >= 20
    return specs
