"""Temporal convolution blocks.

A block is two weight-normalized dilated convolutions, each followed by
ReLU and channel (spatial) dropout, wrapped in a residual connection:

    f(p) = Drop(ReLU(Conv2(Drop(ReLU(Conv1(p))))))
    out  = ReLU(p' + f(p))

where p' is p routed through a trained 1x1 convolution whenever the
channel counts differ, and the raw input otherwise. Both convolutions are
causal by default; the acausal variant uses centered padding instead.
Dropout zeroes whole channels across all time steps (train mode only) and
rescales survivors by 1/(1-rate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import ConfigError


@dataclass
class TcnBlockConfig:
    in_channels: int
    out_channels: int
    kernel_size: int
    dilation: int
    dropout_rate: float = 0.0
    causal: bool = True

    def validate(self):
        if self.in_channels < 1 or self.out_channels < 1:
            raise ConfigError(f"block channels must be positive, got {self.in_channels}->{self.out_channels}")
        if self.kernel_size < 1:
            raise ConfigError(f"kernel size must be >= 1, got {self.kernel_size}")
        if self.dilation < 1:
            raise ConfigError(f"dilation must be >= 1, got {self.dilation}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout rate must be in [0, 1), got {self.dropout_rate}")

    @property
    def receptive_field(self) -> int:
        # two convolutions per block
        return 1 + 2 * (self.kernel_size - 1) * self.dilation


def he_direction(rng: np.random.Generator, shape, fan_in: int, dtype=np.float32) -> np.ndarray:
    """He-style fan-in scaled normal init for a conv/dense direction."""
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(dtype)


def channel_norms(v: np.ndarray) -> np.ndarray:
    flat = v.reshape(v.shape[0], -1)
    return np.sqrt((flat.astype(np.float64) ** 2).sum(axis=1)).astype(v.dtype)


def spatial_dropout(x: T.Tensor, rate: float, mode: str,
                    rng: np.random.Generator | None) -> T.Tensor:
    """Zero whole channels with probability `rate`; identity in eval mode."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if mode == "eval" or rate == 0.0:
        return x
    if mode != "train":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("train-mode dropout needs an rng")
    # mask shape [C, 1] (or [B, C, 1]) so each channel drops across all time steps
    mask_shape = x.shape[:-1] + (1,)
    keep = rng.random(mask_shape) >= rate
    mask = keep.astype(x.data.dtype) / (1.0 - rate)
    return T.mul_const(x, mask)


class TcnBlock:
    """One residual block; owns its weight-norm parameters."""

    def __init__(self, config: TcnBlockConfig, rng: np.random.Generator, dtype=np.float32):
        config.validate()
        self.config = config
        cin, cout, k = config.in_channels, config.out_channels, config.kernel_size
        v1 = he_direction(rng, (cout, cin, k), cin * k, dtype)
        v2 = he_direction(rng, (cout, cout, k), cout * k, dtype)
        # g starts at ||v[c]|| so the initial effective weight equals v
        self.v1 = T.Tensor(v1, requires_grad=True)
        self.g1 = T.Tensor(channel_norms(v1), requires_grad=True)
        self.b1 = T.Tensor(np.zeros(cout, dtype), requires_grad=True)
        self.v2 = T.Tensor(v2, requires_grad=True)
        self.g2 = T.Tensor(channel_norms(v2), requires_grad=True)
        self.b2 = T.Tensor(np.zeros(cout, dtype), requires_grad=True)
        if cin != cout:
            self.wa = T.Tensor(he_direction(rng, (cout, cin, 1), cin, dtype), requires_grad=True)
            self.ba = T.Tensor(np.zeros(cout, dtype), requires_grad=True)
        else:
            self.wa = None
            self.ba = None

    def parameters(self) -> dict:
        params = {"conv1.v": self.v1, "conv1.g": self.g1, "conv1.b": self.b1,
                  "conv2.v": self.v2, "conv2.g": self.g2, "conv2.b": self.b2}
        if self.wa is not None:
            params["adapter.w"] = self.wa
            params["adapter.b"] = self.ba
        return params

    def forward(self, x: T.Tensor, mode: str = "eval",
                rng: np.random.Generator | None = None) -> T.Tensor:
        cfg = self.config
        h = T.conv1d_dilated(x, T.weight_norm(self.v1, self.g1), self.b1,
                             dilation=cfg.dilation, causal=cfg.causal)
        h = spatial_dropout(T.relu(h), cfg.dropout_rate, mode, rng)
        h = T.conv1d_dilated(h, T.weight_norm(self.v2, self.g2), self.b2,
                             dilation=cfg.dilation, causal=cfg.causal)
        h = spatial_dropout(T.relu(h), cfg.dropout_rate, mode, rng)
        if self.wa is not None:
            res = T.conv1d_dilated(x, self.wa, self.ba, dilation=1, causal=cfg.causal)
        else:
            res = x
        return T.relu(T.add(res, h))


def stack_receptive_field(configs) -> int:
    """Analytic receptive field of a block stack (two convs per block)."""
    return 1 + sum(2 * (c.kernel_size - 1) * c.dilation for c in configs)


def forward_stack(blocks, x: T.Tensor, mode: str = "eval",
                  rng: np.random.Generator | None = None) -> T.Tensor:
    for block in blocks:
        x = block.forward(x, mode, rng)
    return x
