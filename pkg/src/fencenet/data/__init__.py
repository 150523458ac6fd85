from .pose import (
    ACTIONS,
    ACTION_INDEX,
    CANONICAL_JOINTS,
    JOINT_INDEX,
    KEYPOINT_SET_NAMES,
    KeypointSet,
    PoseSequence,
    keypoint_set,
    load_manifest,
    resolve_front_side,
    save_manifest,
    sequence_to_json_line,
)
from .splits import fencer_ids, split_pi, split_random
from .synth import generate_dataset, generate_sequence
from .windows import (
    DataConfig,
    WINDOW_LENGTH,
    WindowSample,
    WindowSet,
    apply_transform,
    build_window_set,
    normalize_window,
    random_offsets,
    stride_offsets,
    video_rng,
    windows_for_sequence,
    zero_pad_sample,
)

__all__ = [
    "ACTIONS", "ACTION_INDEX", "CANONICAL_JOINTS", "JOINT_INDEX",
    "KEYPOINT_SET_NAMES", "KeypointSet", "PoseSequence", "keypoint_set",
    "load_manifest", "resolve_front_side", "save_manifest", "sequence_to_json_line",
    "fencer_ids", "split_pi", "split_random",
    "generate_dataset", "generate_sequence",
    "DataConfig", "WINDOW_LENGTH", "WindowSample", "WindowSet",
    "apply_transform", "build_window_set", "normalize_window",
    "random_offsets", "stride_offsets", "video_rng", "windows_for_sequence",
    "zero_pad_sample",
]
