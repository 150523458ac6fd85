"""Mini-batch training: cross-entropy loss, Adam, deterministic seeding.

One call to `train` runs the configured number of epochs over shuffled
windows, one Adam update per batch, and returns a per-epoch log plus a
checksum of the final parameters. Identical (seed, data, config) inputs
reproduce the run bit for bit. A non-finite loss aborts immediately with
the epoch/batch context instead of training through garbage.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .errors import ConfigError, DataError, NumericError, ShapeError
from .data.windows import WindowSet


@dataclass
class TrainConfig:
    epochs: int = 103
    batch_size: int = 64
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    seed: int = 0

    def validate(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not 0.0 <= self.beta1 < 1.0 or not 0.0 <= self.beta2 < 1.0:
            raise ConfigError("adam betas must be in [0, 1)")

    def to_dict(self) -> dict:
        return {"epochs": self.epochs, "batch_size": self.batch_size,
                "learning_rate": self.learning_rate, "beta1": self.beta1,
                "beta2": self.beta2, "eps": self.eps,
                "weight_decay": self.weight_decay, "seed": self.seed}

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        return cls(**obj)


class Adam:
    """Standard Adam with bias correction; step() reads each param's .grad."""

    def __init__(self, params: dict, config: TrainConfig):
        self.params = params
        self.config = config
        self.t = 0
        self.m = {name: np.zeros_like(p.data) for name, p in params.items()}
        self.v = {name: np.zeros_like(p.data) for name, p in params.items()}

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None

    def step(self):
        cfg = self.config
        self.t += 1
        bc1 = 1.0 - cfg.beta1 ** self.t
        bc2 = 1.0 - cfg.beta2 ** self.t
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            if g.shape != p.data.shape:
                raise ShapeError(f"gradient shape {g.shape} != param shape {p.data.shape} for {name}")
            if cfg.weight_decay:
                g = g + cfg.weight_decay * p.data
            m = self.m[name]
            v = self.v[name]
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * g
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * (g * g)
            p.data -= cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)


@dataclass
class TrainLog:
    epochs: list = field(default_factory=list)  # {"epoch", "loss", "accuracy", "seconds"}
    checksum: str = ""
    untouched: list = field(default_factory=list)

    def final_loss(self) -> float:
        return self.epochs[-1]["loss"] if self.epochs else float("nan")

    def to_jsonl(self) -> str:
        import json
        lines = [json.dumps(e) for e in self.epochs]
        lines.append(json.dumps({"checksum": self.checksum, "untouched": self.untouched}))
        return "\n".join(lines) + "\n"


def train(model, windows: WindowSet, config: TrainConfig) -> TrainLog:
    """Train `model` in place on `windows`; returns the run log."""
    config.validate()
    n = len(windows)
    if n == 0:
        raise DataError("empty training set")
    if windows.x.shape[1] != model.config.input_channels:
        raise ShapeError(f"training windows have {windows.x.shape[1]} channels, "
                         f"model expects {model.config.input_channels}")
    params = model.parameters()
    opt = Adam(params, config)
    # separate streams so batch order and dropout masks are independently stable
    shuffle_rng = np.random.default_rng([config.seed, 11])
    dropout_rng = np.random.default_rng([config.seed, 13])
    log = TrainLog()
    first_step_done = False
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        perm = shuffle_rng.permutation(n)
        total_loss = 0.0
        correct = 0
        for lo in range(0, n, config.batch_size):
            idx = perm[lo:lo + config.batch_size]
            xb = T.Tensor(windows.x[idx])
            yb = windows.y[idx]
            with T.Tape() as tape:
                logits = model.forward(xb, "train", dropout_rng)
                loss = T.softmax_cross_entropy(logits, yb)
            loss_value = loss.item()
            if not np.isfinite(loss_value):
                raise NumericError(f"non-finite loss at epoch {epoch} batch {lo // config.batch_size} "
                                   f"(lr={config.learning_rate})")
            opt.zero_grad()
            T.backward(loss, tape)
            opt.step()
            if not first_step_done:
                log.untouched = [name for name, p in params.items()
                                 if p.grad is None or not np.any(p.grad)]
                first_step_done = True
            total_loss += loss_value * len(idx)
            correct += int((np.argmax(logits.data, axis=1) == yb).sum())
        log.epochs.append({
            "epoch": epoch,
            "loss": total_loss / n,
            "accuracy": correct / n,
            "seconds": round(time.perf_counter() - t0, 4),
        })
    log.checksum = T.parameter_checksum(params)
    return log
