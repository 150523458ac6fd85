"""Synthetic footwork videos for desk-scale runs and tests.

Generates 13-joint pose sequences in pixel-like units that mimic the six
footwork classes: steps translate the whole body forward (SF) or backward
(SB); the four lunge classes share one trajectory shape but differ in
dynamics. R surges early at constant fast speed, IS accelerates from the
first frame, WW holds still before surging, and JS is a fast surge whose
back ankle slides forward instead of staying planted. Per-fencer scale,
tempo, amplitude, and lead-side quirks make leave-one-fencer-out splits
meaningful; hip tracks carry very little noise so velocity-profile
assertions stay sharp, while limb joints jitter like real detections.
"""

from __future__ import annotations

import numpy as np

from .pose import ACTIONS, JOINT_INDEX, PoseSequence

# en-garde template, origin at hip center, y pointing down (image convention)
_TEMPLATE = {
    "nose": (18.0, -150.0),
    "front_shoulder": (12.0, -112.0), "back_shoulder": (-12.0, -112.0),
    "front_elbow": (34.0, -75.0), "back_elbow": (-20.0, -75.0),
    "front_wrist": (58.0, -55.0), "back_wrist": (-14.0, -60.0),
    "front_hip": (8.0, 0.0), "back_hip": (-8.0, 0.0),
    "front_knee": (30.0, 75.0), "back_knee": (-22.0, 75.0),
    "front_ankle": (55.0, 148.0), "back_ankle": (-35.0, 148.0),
}

HIP_NOISE = 0.05    # keeps velocity profiles clean for the class oracles
LIMB_NOISE = 0.5    # pose-estimator-like jitter on everything else


def _template_for_lead(lead: str) -> np.ndarray:
    """Map template slots onto canonical joints for a left- or right-leading fencer."""
    front, back = ("l", "r") if lead == "left" else ("r", "l")
    coords = np.zeros((13, 2))
    coords[JOINT_INDEX["nose"]] = _TEMPLATE["nose"]
    for part in ("shoulder", "elbow", "wrist", "hip", "knee", "ankle"):
        coords[JOINT_INDEX[f"{front}_{part}"]] = _TEMPLATE[f"front_{part}"]
        coords[JOINT_INDEX[f"{back}_{part}"]] = _TEMPLATE[f"back_{part}"]
    return coords


def _ramp(t: np.ndarray, start: float, duration: float) -> np.ndarray:
    return np.clip((t - start) / max(duration, 1.0), 0.0, 1.0)


def _smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _phase(action: str, num_frames: int, rng: np.random.Generator, tempo: float) -> np.ndarray:
    """Action progress in [0, 1] per frame; the profile shape codes the class.

    Onsets jitter per video so the signal is temporal shape, not absolute
    frame position (convolutions shrug at shifts, frame-anchored probes
    should not get them for free).
    """
    t = np.arange(num_frames, dtype=np.float64)
    if action in ("R", "JS"):
        onset = rng.integers(0, 12)
        return _ramp(t, onset, round(4 / tempo))
    if action == "IS":
        # accelerating from frame 0 so every window sees increasing speed
        return (t / (num_frames - 1)) ** 2
    if action == "WW":
        # lunge begins, pauses part-way while the fencer watches, completes
        onset = rng.integers(0, 6)
        hold = rng.integers(6, 13)
        first = 0.35 * _ramp(t, onset, 4)
        second = 0.65 * _ramp(t, onset + 4 + hold, round(6 / tempo))
        return first + second
    if action in ("SF", "SB"):
        start = rng.integers(0, max(1, num_frames // 4))
        span = max(8.0, num_frames - 1 - start - rng.integers(0, 4))
        return _smoothstep((t - start) / span)
    raise ValueError(f"unknown action {action!r}")


def _displacement_weights(action: str, lead: str) -> np.ndarray:
    """Per-joint share of the surge amplitude along x."""
    front, back = ("l", "r") if lead == "left" else ("r", "l")
    w = np.zeros(13)
    if action in ("SF", "SB"):
        w[:] = 1.0
        return w
    # lunges: body and front leg drive forward, back foot stays planted
    for name in ("nose", f"{front}_shoulder", f"{back}_shoulder",
                 f"{front}_hip", f"{back}_hip", f"{back}_elbow", f"{back}_wrist"):
        w[JOINT_INDEX[name]] = 1.0
    w[JOINT_INDEX[f"{front}_knee"]] = 1.3
    w[JOINT_INDEX[f"{front}_ankle"]] = 1.6
    w[JOINT_INDEX[f"{back}_knee"]] = 0.3
    # the weapon arm extends with the lunge
    w[JOINT_INDEX[f"{front}_elbow"]] = 1.3
    w[JOINT_INDEX[f"{front}_wrist"]] = 1.55
    if action == "JS":
        w[JOINT_INDEX[f"{back}_ankle"]] = 0.9
        w[JOINT_INDEX[f"{back}_knee"]] = 0.8
    else:
        w[JOINT_INDEX[f"{back}_ankle"]] = 0.0
    return w


def generate_sequence(action: str, fencer_id: int, rep: int, rng: np.random.Generator,
                      style: dict, fps: float = 30.0) -> PoseSequence:
    lead = style["lead"]
    scale = style["scale"] * rng.uniform(0.97, 1.03)
    tempo = style["tempo"]
    if action in ("SF", "SB"):
        num_frames = int(rng.integers(29, 35))
        amplitude = 45.0 * style["amp"] * rng.uniform(0.9, 1.1)
        if action == "SB":
            amplitude = -amplitude
    else:
        num_frames = int(rng.integers(30, 38))
        amplitude = 62.0 * style["amp"] * rng.uniform(0.9, 1.1)

    base = _template_for_lead(lead) * style.get("stance", 1.0) * scale
    origin = np.array([300.0 + rng.uniform(-40, 40), 260.0 + rng.uniform(-25, 25)])
    phase = _phase(action, num_frames, rng, tempo)
    weights = _displacement_weights(action, lead)

    frames = np.empty((num_frames, 13, 2))
    frames[:] = base + origin
    frames[:, :, 0] += scale * amplitude * phase[:, None] * weights[None, :]
    # slight forward lean of the trunk as the lunge progresses
    if action in ("R", "IS", "WW", "JS"):
        lean = 6.0 * scale * phase
        frames[:, JOINT_INDEX["nose"], 0] += lean
        frames[:, JOINT_INDEX["nose"], 1] += 0.4 * lean

    noise = rng.normal(0.0, LIMB_NOISE, size=frames.shape)
    for hip in ("l_hip", "r_hip"):
        noise[:, JOINT_INDEX[hip], :] = rng.normal(0.0, HIP_NOISE, size=(num_frames, 2))
    frames += noise

    return PoseSequence(
        video_id=f"synth-f{fencer_id:02d}-{action.lower()}-r{rep:02d}",
        fencer_id=fencer_id,
        action=action,
        fps=fps,
        frames=np.round(frames, 2),
    )


def fencer_style(rng: np.random.Generator) -> dict:
    return {
        "scale": float(rng.uniform(0.85, 1.2)),
        "tempo": float(rng.uniform(0.85, 1.2)),
        "amp": float(rng.uniform(0.85, 1.15)),
        "lead": "left" if rng.random() < 0.3 else "right",
        # personal stance geometry: each fencer's joints sit slightly
        # differently, so absolute positions do not transfer across fencers
        "stance": rng.uniform(0.90, 1.10, size=(13, 2)),
    }


def generate_dataset(num_fencers: int = 10, reps_per_action: int = 10,
                     seed: int = 0, fps: float = 30.0) -> list:
    """Synthetic dataset: `num_fencers * 6 * reps_per_action` pose sequences."""
    sequences = []
    for fencer_id in range(1, num_fencers + 1):
        style_rng = np.random.default_rng([seed, fencer_id, 0])
        style = fencer_style(style_rng)
        for action in ACTIONS:
            for rep in range(1, reps_per_action + 1):
                rng = np.random.default_rng([seed, fencer_id, ACTIONS.index(action) + 1, rep])
                sequences.append(generate_sequence(action, fencer_id, rep, rng, style, fps))
    return sequences
