"""Sanity-scale training loop driven by the spec's recorded regime."""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .data import Dataset
from .network import GraphNetwork


# Desk-scale runs take very few optimizer steps per epoch, where the
# unconstrained aggregation scalars can blow up under the recorded momentum
# settings; a fixed gradient-norm ceiling keeps the recorded regime usable
# without touching its lr/momentum/decay values.
GRAD_CLIP_NORM = 5.0


@dataclass
class Metrics:
    actual_params: int
    accuracy: float
    train_accuracy: float
    loss_curve: list[float]
    initial_loss: float

    def to_dict(self) -> dict:
        return {
            "actual_params": self.actual_params,
            "accuracy": self.accuracy,
            "train_accuracy": self.train_accuracy,
            "loss_curve": self.loss_curve,
            "initial_loss": self.initial_loss,
        }


@torch.no_grad()
def evaluate(net: GraphNetwork, x: torch.Tensor, y: torch.Tensor,
             batch_size: int = 256) -> float:
    net.eval()
    correct = 0
    for i in range(0, len(x), batch_size):
        logits = net(x[i:i + batch_size])
        correct += int((logits.argmax(dim=1) == y[i:i + batch_size]).sum())
    return correct / len(x)


@torch.no_grad()
def mean_loss(net: GraphNetwork, x: torch.Tensor, y: torch.Tensor,
              batch_size: int = 256) -> float:
    net.eval()
    crit = nn.CrossEntropyLoss(reduction="sum")
    total = 0.0
    for i in range(0, len(x), batch_size):
        total += float(crit(net(x[i:i + batch_size]), y[i:i + batch_size]))
    return total / len(x)


def train_eval(net: GraphNetwork, data: Dataset, epochs: int = 5,
               seed: int = 0) -> Metrics:
    """Train with the optimizer settings recorded in the spec.

    The recorded regime is 100 epochs; the epoch count here is the desk
    truncation, with the milestone schedule kept as recorded (drops beyond
    the truncation simply never fire).
    """
    torch.manual_seed(seed)
    regime = net.spec.train
    batch = int(regime.get("batch", 128))
    opt = torch.optim.SGD(net.parameters(), lr=float(regime.get("lr", 0.1)),
                          momentum=float(regime.get("momentum", 0.9)),
                          weight_decay=float(regime.get("weight_decay", 1e-4)))
    sched = torch.optim.lr_scheduler.MultiStepLR(
        opt, milestones=[int(m) for m in regime.get("lr_drops", [])], gamma=0.1)
    crit = nn.CrossEntropyLoss()

    initial_loss = mean_loss(net, data.train_x, data.train_y)
    generator = torch.Generator().manual_seed(seed)
    curve: list[float] = []
    n = len(data.train_x)
    for _ in range(epochs):
        net.train()
        order = torch.randperm(n, generator=generator)
        epoch_loss = 0.0
        for i in range(0, n, batch):
            idx = order[i:i + batch]
            opt.zero_grad()
            loss = crit(net(data.train_x[idx]), data.train_y[idx])
            loss.backward()
            nn.utils.clip_grad_norm_(net.parameters(), GRAD_CLIP_NORM)
            opt.step()
            epoch_loss += float(loss.detach()) * len(idx)
        sched.step()
        curve.append(epoch_loss / n)

    return Metrics(
        actual_params=net.actual_params(),
        accuracy=evaluate(net, data.test_x, data.test_y),
        train_accuracy=evaluate(net, data.train_x, data.train_y),
        loss_curve=curve,
        initial_loss=initial_loss,
    )
