"""Footwork classifier architectures.

`fencenet` is a 6-block causal TCN stack whose last time step feeds two
dense layers. `bifencenet` runs two separate 4-block causal stacks, one on
the window and one on its time reversal, and concatenates their last-step
features before the dense head; `bifencenet_forward2` feeds the forward
window to both stacks instead. `acausal_flatten` swaps causal for centered
convolutions and flattens the whole final feature map into the head.
Widths/kernels/dilations come from config (see the bundled presets), with
the structural rules enforced here: causal kinds read nothing from the
future, channel widths never shrink, kernel sizes never grow, and the
stack's receptive field covers the full 28-frame window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import tensor as T
from .errors import ConfigError, ShapeError
from .nn import TcnBlock, TcnBlockConfig, forward_stack, he_direction, stack_receptive_field

MODEL_KINDS = ("fencenet", "fencenet_wide", "acausal_flatten",
               "bifencenet", "bifencenet_forward2")

FENCENET_BLOCKS = 6
BIFENCENET_BLOCKS = 4
MIN_RECEPTIVE_FIELD = 28

NUM_CLASSES = 6


@dataclass
class ModelConfig:
    kind: str
    blocks: list  # list[TcnBlockConfig], per direction for bifencenet kinds
    dense_hidden: int = 128
    num_classes: int = NUM_CLASSES
    dropout_rate: float = 0.1
    input_channels: int = 18
    input_length: int = 28

    def __post_init__(self):
        blocks = []
        for b in self.blocks:
            if isinstance(b, dict):
                b = TcnBlockConfig(**b)
            blocks.append(b)
        self.blocks = blocks

    @property
    def is_bidirectional(self) -> bool:
        return self.kind in ("bifencenet", "bifencenet_forward2")

    @property
    def is_causal(self) -> bool:
        return self.kind != "acausal_flatten"

    def normalized(self) -> "ModelConfig":
        """Fill per-block dropout/causality from the model-level settings."""
        blocks = [TcnBlockConfig(b.in_channels, b.out_channels, b.kernel_size,
                                 b.dilation, self.dropout_rate, self.is_causal)
                  for b in self.blocks]
        return ModelConfig(self.kind, blocks, self.dense_hidden, self.num_classes,
                           self.dropout_rate, self.input_channels, self.input_length)

    def validate(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}, expected one of {MODEL_KINDS}")
        expected = BIFENCENET_BLOCKS if self.is_bidirectional else FENCENET_BLOCKS
        if len(self.blocks) != expected:
            raise ConfigError(f"{self.kind} needs {expected} blocks per stack, got {len(self.blocks)}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.num_classes < 2 or self.dense_hidden < 1:
            raise ConfigError("num_classes must be >= 2 and dense_hidden >= 1")
        if self.blocks[0].in_channels != self.input_channels:
            raise ConfigError(f"first block expects {self.blocks[0].in_channels} channels "
                              f"but input has {self.input_channels}")
        for prev, cur in zip(self.blocks, self.blocks[1:]):
            if cur.in_channels != prev.out_channels:
                raise ConfigError(f"block channel chain broken: {prev.out_channels} -> {cur.in_channels}")
            if cur.out_channels < prev.out_channels:
                raise ConfigError("hidden sizes must be non-decreasing across blocks")
            if cur.kernel_size > prev.kernel_size:
                raise ConfigError("kernel sizes must be non-increasing across blocks")
        for b in self.blocks:
            b.validate()
        rf = stack_receptive_field(self.blocks)
        if rf < MIN_RECEPTIVE_FIELD:
            raise ConfigError(f"stack receptive field {rf} does not cover the "
                              f"{MIN_RECEPTIVE_FIELD}-frame window")

    @property
    def receptive_field(self) -> int:
        return stack_receptive_field(self.blocks)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "blocks": [{"in_channels": b.in_channels, "out_channels": b.out_channels,
                        "kernel_size": b.kernel_size, "dilation": b.dilation}
                       for b in self.blocks],
            "dense_hidden": self.dense_hidden,
            "num_classes": self.num_classes,
            "dropout_rate": self.dropout_rate,
            "input_channels": self.input_channels,
            "input_length": self.input_length,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelConfig":
        return cls(**obj)


class _DenseHead:
    """hidden dense + ReLU + output dense."""

    def __init__(self, in_features: int, hidden: int, out_features: int,
                 rng: np.random.Generator, dtype=np.float32):
        self.w1 = T.Tensor(he_direction(rng, (hidden, in_features), in_features, dtype),
                           requires_grad=True)
        self.b1 = T.Tensor(np.zeros(hidden, dtype), requires_grad=True)
        self.w2 = T.Tensor(he_direction(rng, (out_features, hidden), hidden, dtype),
                           requires_grad=True)
        self.b2 = T.Tensor(np.zeros(out_features, dtype), requires_grad=True)

    def __call__(self, z: T.Tensor) -> T.Tensor:
        return T.dense(T.relu(T.dense(z, self.w1, self.b1)), self.w2, self.b2)

    def parameters(self) -> dict:
        return {"head.w1": self.w1, "head.b1": self.b1,
                "head.w2": self.w2, "head.b2": self.b2}


def _check_input(config: ModelConfig, x: T.Tensor):
    if x.ndim not in (2, 3):
        raise ShapeError(f"model input must be [C, T] or [B, C, T], got {x.shape}")
    if x.shape[-2] != config.input_channels:
        raise ShapeError(f"model expects {config.input_channels} channels, got {x.shape[-2]}")
    if x.shape[-1] != config.input_length:
        raise ShapeError(f"model expects {config.input_length}-frame windows, got {x.shape[-1]}")


class FenceNet:
    """Single causal (or centered) block stack with a dense readout."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        config = config.normalized()
        config.validate()
        if config.is_bidirectional:
            raise ConfigError(f"FenceNet cannot be built from kind {config.kind!r}")
        self.config = config
        self.blocks = [TcnBlock(b, rng) for b in config.blocks]
        feat = config.blocks[-1].out_channels
        if config.kind == "acausal_flatten":
            feat *= config.input_length
        self.head = _DenseHead(feat, config.dense_hidden, config.num_classes, rng)

    def features(self, x: T.Tensor, mode: str = "eval", rng=None) -> T.Tensor:
        return forward_stack(self.blocks, x, mode, rng)

    def forward(self, x: T.Tensor, mode: str = "eval", rng=None) -> T.Tensor:
        _check_input(self.config, x)
        h = self.features(x, mode, rng)
        if self.config.kind == "acausal_flatten":
            z = T.flatten_features(h)
        else:
            z = T.last_step(h)
        return self.head(z)

    def parameters(self) -> dict:
        params = {}
        for i, block in enumerate(self.blocks):
            for name, p in block.parameters().items():
                params[f"blocks.{i}.{name}"] = p
        params.update(self.head.parameters())
        return params


class BiFenceNet:
    """Two direction stacks whose last-step features are concatenated."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        config = config.normalized()
        config.validate()
        if not config.is_bidirectional:
            raise ConfigError(f"BiFenceNet cannot be built from kind {config.kind!r}")
        self.config = config
        self.forward_blocks = [TcnBlock(b, rng) for b in config.blocks]
        self.reverse_blocks = [TcnBlock(b, rng) for b in config.blocks]
        feat = 2 * config.blocks[-1].out_channels
        self.head = _DenseHead(feat, config.dense_hidden, config.num_classes, rng)

    def feature_vector(self, x: T.Tensor, mode: str = "eval", rng=None) -> T.Tensor:
        fwd = T.last_step(forward_stack(self.forward_blocks, x, mode, rng))
        second_input = T.reverse_time(x) if self.config.kind == "bifencenet" else x
        rev = T.last_step(forward_stack(self.reverse_blocks, second_input, mode, rng))
        return T.concat_features(fwd, rev)

    def forward(self, x: T.Tensor, mode: str = "eval", rng=None) -> T.Tensor:
        _check_input(self.config, x)
        return self.head(self.feature_vector(x, mode, rng))

    def parameters(self) -> dict:
        params = {}
        for prefix, blocks in (("forward", self.forward_blocks), ("reverse", self.reverse_blocks)):
            for i, block in enumerate(blocks):
                for name, p in block.parameters().items():
                    params[f"{prefix}.{i}.{name}"] = p
        params.update(self.head.parameters())
        return params


def build_model(config: ModelConfig, rng: np.random.Generator):
    config.validate()
    if config.is_bidirectional:
        return BiFenceNet(config, rng)
    return FenceNet(config, rng)


def parameter_count(model) -> int:
    return int(sum(p.size for p in model.parameters().values()))


# checkpoint = parameter file + the JSON config used to build the model

PARAMS_FILE = "params.fnt"
CONFIG_FILE = "model.json"


def save_checkpoint(directory, model, extra: dict | None = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    T.save_parameters(directory / PARAMS_FILE, model.parameters())
    payload = {"model": model.config.to_dict()}
    if extra:
        payload.update(extra)
    (directory / CONFIG_FILE).write_text(json.dumps(payload, indent=2))


def load_checkpoint(directory):
    """Rebuild a model from a checkpoint, validating every parameter shape."""
    directory = Path(directory)
    config_path = directory / CONFIG_FILE
    params_path = directory / PARAMS_FILE
    if not config_path.exists() or not params_path.exists():
        raise FileNotFoundError(f"checkpoint incomplete in {directory}")
    payload = json.loads(config_path.read_text())
    config = ModelConfig.from_dict(payload["model"])
    model = build_model(config, np.random.default_rng(0))
    stored = T.load_parameters(params_path)
    params = model.parameters()
    if set(stored) != set(params):
        missing = sorted(set(params) - set(stored))
        surplus = sorted(set(stored) - set(params))
        raise ShapeError(f"checkpoint/config parameter sets disagree "
                         f"(missing {missing[:3]}, surplus {surplus[:3]})")
    for name, tensor in params.items():
        if stored[name].shape != tensor.data.shape:
            raise ShapeError(f"parameter {name} has shape {stored[name].shape}, "
                             f"config expects {tensor.data.shape}")
        tensor.data = np.ascontiguousarray(stored[name].astype(tensor.data.dtype, copy=False))
    return model, payload
