"""Pose sequences, the JSONL manifest format, and keypoint selection.

Manifest: UTF-8 JSON lines, one video per line, with keys `video_id`,
`fencer_id`, `action`, `fps`, `joints` (the 13 canonical names in order),
`frames` (T x 13 [x, y] pairs, null pair = missing detection) and optional
`front_side` ("left"/"right"). Missing coordinates load as NaN and are
rejected later if a sampled window touches them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import DataError

CANONICAL_JOINTS = (
    "nose",
    "l_shoulder", "r_shoulder",
    "l_elbow", "r_elbow",
    "l_wrist", "r_wrist",
    "l_hip", "r_hip",
    "l_knee", "r_knee",
    "l_ankle", "r_ankle",
)

JOINT_INDEX = {name: i for i, name in enumerate(CANONICAL_JOINTS)}

# class order is fixed; vote tie-breaking and report layout depend on it
ACTIONS = ("R", "IS", "WW", "JS", "SF", "SB")
ACTION_INDEX = {a: i for i, a in enumerate(ACTIONS)}

KEYPOINT_SET_NAMES = ("default9", "full13", "lower6")


@dataclass
class PoseSequence:
    """One video's 2D joint tracks plus its labels."""

    video_id: str
    fencer_id: int
    action: str
    fps: float
    frames: np.ndarray  # [T, 13, 2] float64, NaN = missing
    joint_names: tuple = CANONICAL_JOINTS
    front_side: str = "auto"  # left | right | auto

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.action not in ACTION_INDEX:
            raise DataError(f"video {self.video_id}: unknown action {self.action!r}")
        if self.frames.ndim != 3 or self.frames.shape[1:] != (len(self.joint_names), 2):
            raise DataError(f"video {self.video_id}: frames must be [T, {len(self.joint_names)}, 2], "
                            f"got {self.frames.shape}")
        if self.frames.shape[0] < 1:
            raise DataError(f"video {self.video_id}: empty frame array")
        if tuple(self.joint_names) != CANONICAL_JOINTS:
            raise DataError(f"video {self.video_id}: joints must be the canonical 13 in order")
        if self.front_side not in ("left", "right", "auto"):
            raise DataError(f"video {self.video_id}: front_side must be left/right/auto")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def label(self) -> int:
        return ACTION_INDEX[self.action]


def load_manifest(path) -> list[PoseSequence]:
    sequences = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{line_no}: invalid JSON ({exc})") from exc
            sequences.append(_sequence_from_obj(obj, f"{path}:{line_no}"))
    return sequences


def _sequence_from_obj(obj: dict, where: str) -> PoseSequence:
    try:
        video_id = str(obj["video_id"])
        fencer_id = int(obj["fencer_id"])
        action = str(obj["action"])
        fps = float(obj["fps"])
        joints = tuple(obj["joints"])
        raw_frames = obj["frames"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{where}: malformed manifest record ({exc})") from exc
    frames = np.full((len(raw_frames), len(joints), 2), np.nan, dtype=np.float64)
    for t, frame in enumerate(raw_frames):
        if len(frame) != len(joints):
            raise DataError(f"{where}: video {video_id} frame {t} has {len(frame)} joints, "
                            f"expected {len(joints)}")
        for j, pair in enumerate(frame):
            if pair is not None:
                frames[t, j, 0] = pair[0]
                frames[t, j, 1] = pair[1]
    return PoseSequence(
        video_id=video_id, fencer_id=fencer_id, action=action, fps=fps,
        frames=frames, joint_names=joints,
        front_side=obj.get("front_side", "auto"),
    )


def save_manifest(sequences, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in sequences:
            fh.write(sequence_to_json_line(seq))
            fh.write("\n")


def sequence_to_json_line(seq: PoseSequence) -> str:
    frames = []
    for frame in seq.frames:
        row = []
        for pair in frame:
            if np.isnan(pair).any():
                row.append(None)
            else:
                row.append([float(pair[0]), float(pair[1])])
        frames.append(row)
    obj = {
        "video_id": seq.video_id,
        "fencer_id": seq.fencer_id,
        "action": seq.action,
        "fps": seq.fps,
        "joints": list(seq.joint_names),
        "frames": frames,
    }
    if seq.front_side != "auto":
        obj["front_side"] = seq.front_side
    return json.dumps(obj, separators=(",", ":"))


@dataclass(frozen=True)
class KeypointSet:
    name: str
    joints: tuple  # ordered canonical joint names

    @property
    def channels(self) -> int:
        return 2 * len(self.joints)

    @property
    def indices(self) -> tuple:
        return tuple(JOINT_INDEX[j] for j in self.joints)


def keypoint_set(name: str, front_side: str) -> KeypointSet:
    """Resolve a named keypoint set for a given front ("left"/"right") side."""
    if front_side not in ("left", "right"):
        raise ValueError(f"front side must be resolved to left/right, got {front_side!r}")
    f = "l" if front_side == "left" else "r"
    b = "r" if front_side == "left" else "l"
    if name == "default9":
        joints = (f"{f}_wrist", f"{f}_elbow", f"{f}_shoulder",
                  "l_hip", "r_hip", "l_knee", "r_knee", "l_ankle", "r_ankle")
    elif name == "full13":
        # default9 plus nose and the back arm, kept in default9-then-extras order
        joints = (f"{f}_wrist", f"{f}_elbow", f"{f}_shoulder",
                  "l_hip", "r_hip", "l_knee", "r_knee", "l_ankle", "r_ankle",
                  "nose", f"{b}_wrist", f"{b}_elbow", f"{b}_shoulder")
    elif name == "lower6":
        joints = ("l_hip", "r_hip", "l_knee", "r_knee", "l_ankle", "r_ankle")
    else:
        raise ValueError(f"unknown keypoint set {name!r}, expected one of {KEYPOINT_SET_NAMES}")
    return KeypointSet(name=name, joints=joints)


def resolve_front_side(window_frames: np.ndarray, action: str, declared: str = "auto") -> str:
    """Pick the leading (front) side of the fencer for one window.

    Uses the ankle that sits farthest from the hip midpoint, measured along
    the direction of net hip displacement over the window. Backward steps
    move away from the opponent, so their direction is negated before the
    comparison. An explicit left/right declaration wins.
    """
    if declared in ("left", "right"):
        return declared
    hip_mid_x = 0.5 * (window_frames[:, JOINT_INDEX["l_hip"], 0]
                       + window_frames[:, JOINT_INDEX["r_hip"], 0])
    direction = float(np.sign(hip_mid_x[-1] - hip_mid_x[0]))
    if action == "SB":
        direction = -direction
    if direction == 0.0:
        direction = 1.0
    origin = hip_mid_x[0]
    left_score = direction * (window_frames[0, JOINT_INDEX["l_ankle"], 0] - origin)
    right_score = direction * (window_frames[0, JOINT_INDEX["r_ankle"], 0] - origin)
    return "left" if left_score > right_score else "right"
