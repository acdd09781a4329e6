"""Small local image datasets for desk-scale sanity training.

The default is a deterministic synthetic 10-class 32x32 RGB set (oriented
gratings with per-class frequency, plus noise): no downloads, fixed by
seed, and learnable well past chance within a few epochs.  A CIFAR-10
loader is available when the binary batches are already on disk.
"""

from __future__ import annotations

import os
import pickle
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
import torch


@dataclass
class DataConfig:
    source: str = "synthetic"  # synthetic | cifar10
    root: str = ""             # directory with cifar-10-batches-py for "cifar10"
    train_size: int = 2000
    test_size: int = 1000
    image_size: int = 32
    num_classes: int = 10
    seed: int = 0
    noise: float = 0.6


@dataclass
class Dataset:
    train_x: torch.Tensor
    train_y: torch.Tensor
    test_x: torch.Tensor
    test_y: torch.Tensor


class DatasetMissingError(FileNotFoundError):
    pass


def _grating(size: int, angle: float, freq: float, phase: float) -> np.ndarray:
    ax = np.arange(size) / size
    xx, yy = np.meshgrid(ax, ax)
    t = xx * np.cos(angle) + yy * np.sin(angle)
    return np.sin(2.0 * np.pi * freq * t + phase)


def make_synthetic(cfg: DataConfig) -> Dataset:
    rng = np.random.default_rng(cfg.seed)
    k = cfg.num_classes
    angles = np.pi * np.arange(k) / k
    freqs = 2.0 + (np.arange(k) % 5)

    def sample(count: int) -> tuple[np.ndarray, np.ndarray]:
        labels = rng.integers(0, k, size=count)
        images = np.empty((count, 3, cfg.image_size, cfg.image_size), dtype=np.float32)
        for i, label in enumerate(labels):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            base = _grating(cfg.image_size, angles[label], freqs[label], phase)
            for c in range(3):
                images[i, c] = base * (0.6 + 0.2 * c)
        images += rng.normal(0.0, cfg.noise, size=images.shape).astype(np.float32)
        return images, labels.astype(np.int64)

    train_x, train_y = sample(cfg.train_size)
    test_x, test_y = sample(cfg.test_size)
    return Dataset(torch.from_numpy(train_x), torch.from_numpy(train_y),
                   torch.from_numpy(test_x), torch.from_numpy(test_y))


def load_cifar10(cfg: DataConfig) -> Dataset:
    """Seed-fixed subset of local CIFAR-10 python batches (no downloads)."""
    batch_dir = os.path.join(cfg.root, "cifar-10-batches-py")
    if not os.path.isdir(batch_dir):
        raise DatasetMissingError(
            f"no cifar-10-batches-py under {cfg.root!r}; place the dataset there "
            f"or use the synthetic source")
    xs, ys = [], []
    for name in [f"data_batch_{i}" for i in range(1, 6)] + ["test_batch"]:
        with open(os.path.join(batch_dir, name), "rb") as fh:
            raw = pickle.load(fh, encoding="bytes")
        xs.append(raw[b"data"].reshape(-1, 3, 32, 32).astype(np.float32) / 255.0)
        ys.append(np.asarray(raw[b"labels"], dtype=np.int64))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    mean = x.mean(axis=(0, 2, 3), keepdims=True)
    std = x.std(axis=(0, 2, 3), keepdims=True)
    x = (x - mean) / std
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(x))
    train_idx = order[:cfg.train_size]
    test_idx = order[cfg.train_size:cfg.train_size + cfg.test_size]
    return Dataset(torch.from_numpy(x[train_idx]), torch.from_numpy(y[train_idx]),
                   torch.from_numpy(x[test_idx]), torch.from_numpy(y[test_idx]))


def load_dataset(cfg: DataConfig | Mapping[str, Any]) -> Dataset:
    if not isinstance(cfg, DataConfig):
        cfg = DataConfig(**dict(cfg))
    if cfg.source == "synthetic":
        return make_synthetic(cfg)
    if cfg.source == "cifar10":
        return load_cifar10(cfg)
    raise ValueError(f"unknown dataset source {cfg.source!r}")
