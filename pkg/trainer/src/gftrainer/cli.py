"""gftrain: build a network from an arch spec, verify it, optionally train."""

from __future__ import annotations

import argparse
import json
import sys

import torch

from .data import DataConfig, load_dataset
from .network import ParamMismatchError, build_network
from .spec import SpecError, load_spec
from .train import train_eval


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gftrain",
                                description="Build and sanity-train a network "
                                            "from an arch spec JSON.")
    p.add_argument("--spec", required=True, help="arch spec JSON file")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--data", default="synthetic", choices=("synthetic", "cifar10"))
    p.add_argument("--data-root", default="", help="directory holding CIFAR-10 batches")
    p.add_argument("--train-size", type=int, default=2000)
    p.add_argument("--test-size", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write metrics JSON here (default: stdout)")
    p.add_argument("--build-only", action="store_true",
                   help="only build and verify the parameter count")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        torch.manual_seed(args.seed)
        net = build_network(spec)
    except (OSError, SpecError, ParamMismatchError) as exc:
        print(f"gftrain: {exc}", file=sys.stderr)
        return 2
    if args.build_only:
        print(f"built ok: actual_params={net.actual_params()} "
              f"(predicted {spec.predicted_params})")
        return 0
    cfg = DataConfig(source=args.data, root=args.data_root,
                     train_size=args.train_size, test_size=args.test_size,
                     num_classes=spec.num_classes, seed=args.seed)
    try:
        data = load_dataset(cfg)
    except FileNotFoundError as exc:
        print(f"gftrain: {exc}", file=sys.stderr)
        return 2
    metrics = train_eval(net, data, epochs=args.epochs, seed=args.seed)
    payload = json.dumps(metrics.to_dict(), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
