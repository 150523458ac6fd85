"""Train/test splits at the video level.

Person-independent (PI) folds hold out every video of one fencer; the
random split removes a fraction of the repetitions per (fencer, action)
group. Windows always follow their video, so neither split can leak
window-level data across the boundary.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np


def fencer_ids(sequences) -> list:
    return sorted({seq.fencer_id for seq in sequences})


def split_pi(sequences, held_out_fencer: int):
    """All videos of `held_out_fencer` go to test, the rest to train."""
    if held_out_fencer not in {seq.fencer_id for seq in sequences}:
        raise ValueError(f"unknown fencer id {held_out_fencer}")
    train = [s for s in sequences if s.fencer_id != held_out_fencer]
    test = [s for s in sequences if s.fencer_id == held_out_fencer]
    return train, test


def split_random(sequences, fraction: float = 0.2, rng: np.random.Generator | None = None):
    """Per (fencer, action) group, move round(fraction * n) videos to test."""
    if rng is None:
        rng = np.random.default_rng()
    groups = defaultdict(list)
    for seq in sequences:
        groups[(seq.fencer_id, seq.action)].append(seq)
    test_ids = set()
    for key in sorted(groups):
        group = sorted(groups[key], key=lambda s: s.video_id)
        n_test = round(fraction * len(group))
        picked = rng.permutation(len(group))[:n_test]
        test_ids.update(group[i].video_id for i in picked)
    train = [s for s in sequences if s.video_id not in test_ids]
    test = [s for s in sequences if s.video_id in test_ids]
    if not test:
        raise ValueError(f"empty test split for fraction {fraction}")
    return train, test
