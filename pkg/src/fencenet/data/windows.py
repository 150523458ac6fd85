"""Window extraction: normalization, sampling policies, ablation transforms.

The pipeline per sampled window is: resolve the front side, normalize
coordinates (nose of the window's first frame becomes the origin, all
coordinates divided by the frame-0 vertical nose-to-front-ankle distance),
select keypoints, interleave x/y per joint into channels, then apply the
configured time transform. Normalization is per window, not per video.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from .pose import JOINT_INDEX, PoseSequence, keypoint_set, resolve_front_side

WINDOW_LENGTH = 28
MAX_SAMPLES = 10
MAX_START_OFFSET = 20

SCALE_EPSILON = 1e-6


@dataclass
class DataConfig:
    """Preprocessing knobs shared by training and evaluation."""

    keypoints: str = "default9"
    sampling: str = "stride"      # stride | random
    padding: str = "sample"       # sample | zero_pad
    transform: str = "forward"    # forward | reversed | shuffled
    window: int = WINDOW_LENGTH
    max_samples: int = MAX_SAMPLES
    max_offset: int = MAX_START_OFFSET

    def validate(self):
        from ..errors import ConfigError
        if self.sampling not in ("stride", "random"):
            raise ConfigError(f"unknown sampling policy {self.sampling!r}")
        if self.padding not in ("sample", "zero_pad"):
            raise ConfigError(f"unknown padding mode {self.padding!r}")
        if self.transform not in ("forward", "reversed", "shuffled"):
            raise ConfigError(f"unknown transform {self.transform!r}")
        if self.keypoints not in ("default9", "full13", "lower6"):
            raise ConfigError(f"unknown keypoint set {self.keypoints!r}")
        if self.window < 1 or self.max_samples < 1 or self.max_offset < 1:
            raise ConfigError("window, max_samples and max_offset must be positive")

    @property
    def channels(self) -> int:
        return {"default9": 18, "full13": 26, "lower6": 12}[self.keypoints]


@dataclass
class WindowSample:
    video_id: str
    start_offset: int
    data: np.ndarray  # [C, L] float32, already normalized and transformed
    label: int


@dataclass
class WindowSet:
    """Stacked window samples ready for batched model passes."""

    x: np.ndarray          # [N, C, L] float32
    y: np.ndarray          # [N] int64
    video_ids: list
    offsets: np.ndarray    # [N] int64
    fencer_ids: np.ndarray  # [N] int64

    def __len__(self):
        return self.x.shape[0]


def normalize_window(window_frames: np.ndarray, nose_index: int, front_ankle_index: int,
                     video_id: str = "?") -> np.ndarray:
    """Shift to the frame-0 nose and divide by the frame-0 vertical nose-ankle distance.

    One scalar scale is used for both axes; the raw per-axis form would be
    degenerate horizontally. Raises DataError when the fencer height in the
    first frame is effectively zero.
    """
    origin = window_frames[0, nose_index]
    scale = abs(window_frames[0, nose_index, 1] - window_frames[0, front_ankle_index, 1])
    if not np.isfinite(scale) or scale <= SCALE_EPSILON:
        raise DataError(f"video {video_id}: degenerate nose-to-ankle scale ({scale!r}) in window frame 0")
    return (window_frames - origin) / scale


def stride_offsets(num_frames: int, window: int = WINDOW_LENGTH,
                   max_samples: int = MAX_SAMPLES, max_offset: int = MAX_START_OFFSET) -> list:
    """Deterministic sampling schedule: even offsets, capped count.

    Yields min(max_samples, floor((T - window)/2) + 1) windows for the
    default settings, which hits the cap exactly when T >= 46.
    """
    if num_frames < window:
        raise DataError(f"cannot sample a {window}-frame window from {num_frames} frames")
    limit = min(max_offset - 1, num_frames - window)
    return list(range(0, limit + 1, 2))[:max_samples]


def random_offsets(num_frames: int, rng: np.random.Generator, window: int = WINDOW_LENGTH,
                   max_samples: int = MAX_SAMPLES, max_offset: int = MAX_START_OFFSET) -> list:
    """Distinct uniformly drawn start offsets, capped count."""
    if num_frames < window:
        raise DataError(f"cannot sample a {window}-frame window from {num_frames} frames")
    hi = min(max_offset, num_frames - window)
    count = min(max_samples, hi + 1)
    return sorted(int(o) for o in rng.choice(hi + 1, size=count, replace=False))


def video_rng(root_seed: int, video_id: str, *extra: int) -> np.random.Generator:
    """Per-video RNG stream so parallel and serial runs agree."""
    digest = hashlib.blake2s(video_id.encode("utf-8"), digest_size=8).digest()
    return np.random.default_rng([root_seed, int.from_bytes(digest, "little"), *extra])


def _check_finite(window_frames: np.ndarray, video_id: str, start: int) -> None:
    bad = np.argwhere(~np.isfinite(window_frames))
    if bad.size:
        frame = start + int(bad[0][0])
        raise DataError(f"video {video_id}: missing coordinates at frame {frame}")


def _to_channels(frames: np.ndarray, indices) -> np.ndarray:
    # [L, J, 2] -> [2J, L], x and y interleaved per joint
    sel = frames[:, indices, :]
    return np.ascontiguousarray(sel.transpose(1, 2, 0).reshape(-1, frames.shape[0]))


def apply_transform(data: np.ndarray, transform: str,
                    rng: np.random.Generator | None = None) -> np.ndarray:
    """Time-order transform on [C, L] channel data."""
    if transform == "forward":
        return data
    if transform == "reversed":
        return np.ascontiguousarray(data[:, ::-1])
    if transform == "shuffled":
        if rng is None:
            raise ValueError("shuffled transform needs an rng")
        perm = rng.permutation(data.shape[1])
        return np.ascontiguousarray(data[:, perm])
    raise ValueError(f"unknown transform {transform!r}")


def extract_window(seq: PoseSequence, start: int, config: DataConfig, root_seed: int,
                   length: int | None = None) -> WindowSample:
    length = config.window if length is None else length
    window = seq.frames[start:start + length]
    _check_finite(window, seq.video_id, start)
    front = resolve_front_side(window, seq.action, seq.front_side)
    kset = keypoint_set(config.keypoints, front)
    ankle_idx = JOINT_INDEX[f"{'l' if front == 'left' else 'r'}_ankle"]
    normalized = normalize_window(window, JOINT_INDEX["nose"], ankle_idx, seq.video_id)
    data = _to_channels(normalized, kset.indices)
    if config.transform == "shuffled":
        data = apply_transform(data, "shuffled", video_rng(root_seed, seq.video_id, start))
    else:
        data = apply_transform(data, config.transform)
    return WindowSample(video_id=seq.video_id, start_offset=start,
                        data=data.astype(np.float32), label=seq.label)


def windows_for_sequence(seq: PoseSequence, config: DataConfig, root_seed: int,
                         pad_target: int | None = None) -> list:
    """All window samples of one video under the configured policy."""
    if config.padding == "zero_pad":
        return [zero_pad_sample(seq, config, root_seed, pad_target)]
    if config.sampling == "random":
        offsets = random_offsets(seq.num_frames, video_rng(root_seed, seq.video_id),
                                 config.window, config.max_samples, config.max_offset)
    else:
        offsets = stride_offsets(seq.num_frames, config.window,
                                 config.max_samples, config.max_offset)
    return [extract_window(seq, o, config, root_seed) for o in offsets]


def zero_pad_sample(seq: PoseSequence, config: DataConfig, root_seed: int,
                    target: int | None) -> WindowSample:
    """One sample per video: normalize the whole video, zero-pad to `target` frames."""
    if target is None:
        target = seq.num_frames
    usable = min(seq.num_frames, target)
    sample = extract_window(seq, 0, config, root_seed, length=usable)
    data = sample.data
    if usable < target:
        padded = np.zeros((data.shape[0], target), dtype=np.float32)
        padded[:, :usable] = data
        sample.data = padded
    return sample


def build_window_set(sequences, config: DataConfig, root_seed: int = 0,
                     pad_target: int | None = None) -> WindowSet:
    """Stack every video's windows into one WindowSet.

    For zero_pad mode, `pad_target` should be the maximum training-set
    length; it is computed from `sequences` when not given.
    """
    config.validate()
    if config.padding == "zero_pad" and pad_target is None:
        pad_target = max(seq.num_frames for seq in sequences)
    samples = []
    fencers = []
    for seq in sequences:
        for sample in windows_for_sequence(seq, config, root_seed, pad_target):
            samples.append(sample)
            fencers.append(seq.fencer_id)
    if not samples:
        raise DataError("no windows produced from the given sequences")
    x = np.stack([s.data for s in samples]).astype(np.float32)
    y = np.asarray([s.label for s in samples], dtype=np.int64)
    offsets = np.asarray([s.start_offset for s in samples], dtype=np.int64)
    return WindowSet(x=x, y=y, video_ids=[s.video_id for s in samples],
                     offsets=offsets, fencer_ids=np.asarray(fencers, dtype=np.int64))
