"""gftrainer: build and sanity-train networks from graph wiring specs."""

__version__ = "0.1.0"

from .data import DataConfig, Dataset, load_dataset
from .network import GraphNetwork, ParamMismatchError, build_network
from .spec import ArchSpec, SpecError, load_spec, parse_spec
from .train import Metrics, evaluate, train_eval

__all__ = [
    "ArchSpec", "DataConfig", "Dataset", "GraphNetwork", "Metrics",
    "ParamMismatchError", "SpecError", "build_network", "evaluate",
    "load_dataset", "load_spec", "parse_spec", "train_eval",
]
