"""Dense float tensors with reverse-mode automatic differentiation.

This is deliberately small: it covers exactly the operations the footwork
models need (dilated causal/centered 1D convolution, affine layers, ReLU,
softmax cross-entropy, weight normalization, constant masks for dropout,
and the slicing/concat glue for sequence readout). Data lives in numpy
arrays; float32 is the default model precision and reductions accumulate
in float64.

Gradients are define-by-run: executing an op while a `Tape` is active
records a backward closure, and `backward(loss, tape)` replays the tape in
exact reverse execution order, accumulating into each tensor's `.grad`.
Without an active tape ops are plain numpy math (inference mode).

Convolution layout: inputs are `[channels, time]` or `[batch, channels,
time]`, weights `[out_channels, in_channels, kernel]` where kernel index i
reaches i*dilation steps into the past. Causal mode left-pads with
(kernel-1)*dilation zeros so output length equals input length and output
at time t never touches inputs after t; centered mode splits the same
padding across both ends.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import NumericError, ShapeError

DEFAULT_DTYPE = np.float32


class Tensor:
    """A dense float array plus an optional gradient of the same shape."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data)
        if dtype is not None:
            arr = arr.astype(dtype, copy=False)
        elif arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(DEFAULT_DTYPE)
        self.data = np.ascontiguousarray(arr)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"


class _Record:
    __slots__ = ("output", "inputs", "backward_fn")

    def __init__(self, output, inputs, backward_fn):
        self.output = output
        self.inputs = inputs
        self.backward_fn = backward_fn


class Tape:
    """Ordered record of executed primitive ops for one forward pass."""

    __slots__ = ("_records",)

    def __init__(self):
        self._records = []

    def __enter__(self) -> "Tape":
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _TAPE_STACK.pop()
        return False

    def __len__(self):
        return len(self._records)

    def record(self, output: Tensor, inputs: Sequence[Tensor],
               backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]):
        self._records.append(_Record(output, tuple(inputs), backward_fn))


_TAPE_STACK: list[Tape] = []


def _active_tape() -> Optional[Tape]:
    return _TAPE_STACK[-1] if _TAPE_STACK else None


def _make_out(data: np.ndarray, inputs: Sequence[Tensor], backward_fn) -> Tensor:
    tape = _active_tape()
    rg = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor.__new__(Tensor)
    out.data = data
    out.requires_grad = rg
    out.grad = None
    if rg:
        tape.record(out, inputs, backward_fn)
    return out


def backward(loss: Tensor, tape: Tape) -> None:
    """Populate `.grad` on every requires_grad tensor reachable from `loss`.

    Gradients accumulate: parameters should be zeroed (or set to None)
    between steps. Raises ValueError if the loss is not scalar.
    """
    if loss.data.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.data.shape}")
    if loss.grad is None:
        loss.grad = np.ones_like(loss.data)
    else:
        loss.grad = loss.grad + np.ones_like(loss.data)
    for rec in reversed(tape._records):
        gout = rec.output.grad
        if gout is None:
            continue
        gins = rec.backward_fn(gout)
        for t, g in zip(rec.inputs, gins):
            if g is None or not t.requires_grad:
                continue
            if g.dtype != t.data.dtype:
                g = g.astype(t.data.dtype)
            t.grad = g if t.grad is None else t.grad + g


# ---------------------------------------------------------------------------
# primitive ops
# ---------------------------------------------------------------------------

def conv1d_dilated(x: Tensor, w: Tensor, b: Tensor, dilation: int = 1,
                   causal: bool = True) -> Tensor:
    """Dilated 1D convolution over `[.., C_in, T]`, same output length.

    Causal mode: output[c, t] = b[c] + sum_i sum_ci w[c, ci, i] * x[ci, t - dilation*i]
    with implicit left zero padding, so nothing after t leaks into t.
    Centered mode splits the padding symmetrically (acausal variant).
    """
    if w.ndim != 3:
        raise ShapeError(f"conv weight must be [C_out, C_in, k], got {w.shape}")
    c_out, c_in, k = w.shape
    if k < 1 or dilation < 1:
        raise ValueError(f"kernel size and dilation must be >= 1, got k={k} d={dilation}")
    if x.ndim not in (2, 3):
        raise ShapeError(f"conv input must be [C, T] or [B, C, T], got {x.shape}")
    if x.shape[-2] != c_in:
        raise ShapeError(f"conv input has {x.shape[-2]} channels, weight expects {c_in}")
    if b.shape != (c_out,):
        raise ShapeError(f"conv bias must be [{c_out}], got {b.shape}")
    single = x.ndim == 2
    xd = x.data[None] if single else x.data
    bsz, _, t_len = xd.shape
    if t_len < 1:
        raise ValueError("conv input must have at least one time step")

    span = (k - 1) * dilation
    pad_left = span if causal else span // 2
    padded = np.zeros((bsz, c_in, t_len + span), dtype=xd.dtype)
    padded[:, :, pad_left:pad_left + t_len] = xd

    # col[b, c, i, t] = padded[b, c, t + dilation*i]; tap i runs oldest -> newest,
    # so the weight kernel is reversed before the matmul.
    s0, s1, s2 = padded.strides
    col = np.lib.stride_tricks.as_strided(
        padded, shape=(bsz, c_in, k, t_len), strides=(s0, s1, dilation * s2, s2))
    col2 = np.ascontiguousarray(col.transpose(1, 2, 0, 3)).reshape(c_in * k, bsz * t_len)
    wr = np.ascontiguousarray(w.data[:, :, ::-1]).reshape(c_out, c_in * k)

    out2 = wr @ col2
    out2 += b.data[:, None]
    out_data = np.ascontiguousarray(out2.reshape(c_out, bsz, t_len).transpose(1, 0, 2))
    if single:
        out_data = out_data[0]

    def bwd(gout):
        god = gout[None] if single else gout
        g2 = np.ascontiguousarray(god.transpose(1, 0, 2)).reshape(c_out, bsz * t_len)
        gx = gw = gb = None
        if b.requires_grad:
            gb = g2.sum(axis=1, dtype=np.float64).astype(b.data.dtype)
        if w.requires_grad:
            gwr = g2 @ col2.T
            gw = np.ascontiguousarray(gwr.reshape(c_out, c_in, k)[:, :, ::-1])
        if x.requires_grad:
            gcol = (wr.T @ g2).reshape(c_in, k, bsz, t_len)
            gpad = np.zeros_like(padded)
            for i in range(k):
                gpad[:, :, dilation * i:dilation * i + t_len] += gcol[:, i].transpose(1, 0, 2)
            gx = gpad[:, :, pad_left:pad_left + t_len]
            if single:
                gx = gx[0]
        return gx, gw, gb

    return _make_out(out_data, (x, w, b), bwd)


def conv1d_dilated_causal(x: Tensor, w: Tensor, b: Tensor, dilation: int = 1) -> Tensor:
    return conv1d_dilated(x, w, b, dilation=dilation, causal=True)


def dense(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Affine map w @ x + b for `[N]` or batched `[B, N]` inputs."""
    if w.ndim != 2:
        raise ShapeError(f"dense weight must be [M, N], got {w.shape}")
    m, n = w.shape
    if x.shape[-1] != n:
        raise ShapeError(f"dense input has {x.shape[-1]} features, weight expects {n}")
    if b.shape != (m,):
        raise ShapeError(f"dense bias must be [{m}], got {b.shape}")
    if x.ndim == 1:
        out_data = w.data @ x.data + b.data
    elif x.ndim == 2:
        out_data = x.data @ w.data.T + b.data
    else:
        raise ShapeError(f"dense input must be [N] or [B, N], got {x.shape}")

    def bwd(gout):
        gx = gw = gb = None
        if x.ndim == 1:
            if x.requires_grad:
                gx = w.data.T @ gout
            if w.requires_grad:
                gw = np.outer(gout, x.data)
            if b.requires_grad:
                gb = gout.copy()
        else:
            if x.requires_grad:
                gx = gout @ w.data
            if w.requires_grad:
                gw = gout.T @ x.data
            if b.requires_grad:
                gb = gout.sum(axis=0, dtype=np.float64).astype(b.data.dtype)
        return gx, gw, gb

    return _make_out(out_data, (x, w, b), bwd)


def relu(x: Tensor) -> Tensor:
    out_data = np.maximum(x.data, 0)
    mask = x.data > 0

    def bwd(gout):
        return (gout * mask,)

    return _make_out(out_data, (x,), bwd)


def softmax_cross_entropy(logits: Tensor, labels) -> Tensor:
    """Cross-entropy -log softmax(logits)[label], scalar output.

    1-D logits take a single class index; 2-D `[B, K]` logits take an index
    array and return the batch mean.
    """
    if logits.ndim == 1:
        k = logits.shape[0]
        label = int(labels)
        if not 0 <= label < k:
            raise ValueError(f"label {label} out of range for {k} classes")
        z = logits.data.astype(np.float64)
        z = z - z.max()
        log_norm = np.log(np.exp(z).sum())
        loss = log_norm - z[label]
        probs = np.exp(z - log_norm)

        def bwd(gout):
            g = probs.copy()
            g[label] -= 1.0
            return (g * float(gout),)

        return _make_out(np.asarray(loss, dtype=logits.data.dtype), (logits,), bwd)

    if logits.ndim == 2:
        bsz, k = logits.shape
        lab = np.asarray(labels, dtype=np.int64)
        if lab.shape != (bsz,):
            raise ShapeError(f"labels must be [{bsz}], got {lab.shape}")
        if lab.min() < 0 or lab.max() >= k:
            raise ValueError(f"label out of range for {k} classes")
        z = logits.data.astype(np.float64)
        z = z - z.max(axis=1, keepdims=True)
        log_norm = np.log(np.exp(z).sum(axis=1, keepdims=True))
        losses = log_norm[:, 0] - z[np.arange(bsz), lab]
        probs = np.exp(z - log_norm)

        def bwd(gout):
            g = probs.copy()
            g[np.arange(bsz), lab] -= 1.0
            return (g * (float(gout) / bsz),)

        return _make_out(np.asarray(losses.mean(), dtype=logits.data.dtype), (logits,), bwd)

    raise ShapeError(f"logits must be [K] or [B, K], got {logits.shape}")


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"add needs equal shapes, got {a.shape} and {b.shape}")

    def bwd(gout):
        return gout, gout

    return _make_out(a.data + b.data, (a, b), bwd)


def mul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"mul needs equal shapes, got {a.shape} and {b.shape}")

    def bwd(gout):
        ga = gout * b.data if a.requires_grad else None
        gb = gout * a.data if b.requires_grad else None
        return ga, gb

    return _make_out(a.data * b.data, (a, b), bwd)


def mul_const(x: Tensor, const: np.ndarray) -> Tensor:
    """Multiply by a constant array (no gradient to the constant).

    The constant may broadcast against x; used for dropout masks.
    """
    const = np.asarray(const, dtype=x.data.dtype)
    out_data = x.data * const

    def bwd(gout):
        g = gout * const
        if g.shape != x.data.shape:
            raise ShapeError("mul_const constant must broadcast without enlarging x")
        return (g,)

    return _make_out(out_data, (x,), bwd)


def scale(x: Tensor, s: float) -> Tensor:
    s = float(s)

    def bwd(gout):
        return (gout * s,)

    return _make_out(x.data * s, (x,), bwd)


def tsum(x: Tensor) -> Tensor:
    out_data = np.asarray(x.data.sum(dtype=np.float64), dtype=x.data.dtype)

    def bwd(gout):
        return (np.full_like(x.data, float(gout)),)

    return _make_out(out_data, (x,), bwd)


def reverse_time(x: Tensor) -> Tensor:
    """Flip index order along the time (last) axis only."""
    out_data = np.ascontiguousarray(x.data[..., ::-1])

    def bwd(gout):
        return (np.ascontiguousarray(gout[..., ::-1]),)

    return _make_out(out_data, (x,), bwd)


def last_step(x: Tensor) -> Tensor:
    """Extract the final time step: `[C, T] -> [C]` or `[B, C, T] -> [B, C]`."""
    if x.ndim < 2:
        raise ShapeError(f"last_step needs a time axis, got {x.shape}")
    out_data = np.ascontiguousarray(x.data[..., -1])

    def bwd(gout):
        g = np.zeros_like(x.data)
        g[..., -1] = gout
        return (g,)

    return _make_out(out_data, (x,), bwd)


def concat_features(a: Tensor, b: Tensor) -> Tensor:
    """Concatenate feature vectors along the last axis."""
    if a.ndim != b.ndim or a.shape[:-1] != b.shape[:-1]:
        raise ShapeError(f"concat needs matching leading dims, got {a.shape} and {b.shape}")
    na = a.shape[-1]
    out_data = np.concatenate([a.data, b.data], axis=-1)

    def bwd(gout):
        ga = np.ascontiguousarray(gout[..., :na]) if a.requires_grad else None
        gb = np.ascontiguousarray(gout[..., na:]) if b.requires_grad else None
        return ga, gb

    return _make_out(out_data, (a, b), bwd)


def flatten_features(x: Tensor) -> Tensor:
    """Row-major flatten: `[C, T] -> [C*T]`, `[B, C, T] -> [B, C*T]`."""
    if x.ndim == 2:
        out_shape = (x.shape[0] * x.shape[1],)
    elif x.ndim == 3:
        out_shape = (x.shape[0], x.shape[1] * x.shape[2])
    else:
        raise ShapeError(f"flatten expects [C, T] or [B, C, T], got {x.shape}")
    out_data = x.data.reshape(out_shape).copy()

    def bwd(gout):
        return (gout.reshape(x.data.shape).copy(),)

    return _make_out(out_data, (x,), bwd)


def weight_norm(v: Tensor, g: Tensor) -> Tensor:
    """Effective weight g[c] * v[c] / ||v[c]|| per output-channel slice.

    The norm is the L2 norm over all of v[c]'s elements, so the effective
    weight of channel c has norm |g[c]|. Differentiable through v and g.
    """
    if v.ndim < 2:
        raise ShapeError(f"weight_norm direction must have an output-channel axis, got {v.shape}")
    c_out = v.shape[0]
    if g.shape != (c_out,):
        raise ShapeError(f"weight_norm magnitude must be [{c_out}], got {g.shape}")
    vflat = v.data.reshape(c_out, -1)
    norms = np.sqrt((vflat.astype(np.float64) ** 2).sum(axis=1)).astype(v.data.dtype)
    if np.any(norms < 1e-12):
        raise NumericError("weight_norm: zero-norm direction vector")
    coef = (g.data / norms).reshape((c_out,) + (1,) * (v.ndim - 1))
    out_data = v.data * coef

    def bwd(gout):
        gflat = gout.reshape(c_out, -1)
        dots = (vflat * gflat).sum(axis=1, dtype=np.float64).astype(v.data.dtype)
        gg = dots / norms if g.requires_grad else None
        gv = None
        if v.requires_grad:
            gv = coef.reshape(c_out, 1) * gflat \
                - ((g.data * dots / norms ** 3).reshape(c_out, 1)) * vflat
            gv = gv.reshape(v.data.shape)
        return gv, gg

    return _make_out(out_data, (v, g), bwd)


# ---------------------------------------------------------------------------
# parameter serialization
# ---------------------------------------------------------------------------
#
# Flat binary container, all integers little-endian:
#   magic  b"FNTP"
#   u32    format version (currently 1)
#   u32    parameter count
# then per parameter, in insertion order:
#   u16    name length, followed by that many UTF-8 bytes
#   u8     dtype code (0 = float32, 1 = float64)
#   u8     ndim
#   u32*   one dimension size per axis
#   raw little-endian element bytes, row-major
#
# Round-trips are bit-exact.

_MAGIC = b"FNTP"
_FORMAT_VERSION = 1
_DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}
_CODE_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}


def save_parameters(path, params: dict) -> None:
    """Write named parameters (Tensor or ndarray values) to `path`."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _FORMAT_VERSION, len(params)))
        for name, value in params.items():
            arr = value.data if isinstance(value, Tensor) else np.asarray(value)
            code = _DTYPE_CODES.get(arr.dtype)
            if code is None:
                raise ValueError(f"unsupported dtype {arr.dtype} for parameter {name}")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<BB", code, arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(np.ascontiguousarray(arr, dtype=_CODE_DTYPES[code]).tobytes())


def load_parameters(path) -> dict:
    """Read a parameter file back into an ordered {name: ndarray} dict."""
    out = {}
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a parameter file")
        version, count = struct.unpack("<II", fh.read(8))
        if version != _FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            code, ndim = struct.unpack("<BB", fh.read(2))
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            dtype = _CODE_DTYPES[code]
            n_bytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
            arr = np.frombuffer(fh.read(n_bytes), dtype=dtype).reshape(shape)
            out[name] = arr.astype(arr.dtype.newbyteorder("="), copy=True)
    return out


def parameter_checksum(params: dict) -> str:
    """SHA-256 over names and raw bytes; stable id for a parameter state."""
    h = hashlib.sha256()
    for name, value in params.items():
        arr = value.data if isinstance(value, Tensor) else np.asarray(value)
        h.update(name.encode("utf-8"))
        h.update(str(arr.shape).encode())
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def zero_grads(params: Iterable) -> None:
    for p in params:
        p.zero_grad()
