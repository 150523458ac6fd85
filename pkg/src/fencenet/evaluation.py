"""Per-video prediction, cross-validation protocols, and reporting.

A video's prediction is the modal class over its sampled windows' argmax
logits, ties going to the lowest class index in the fixed (R, IS, WW, JS,
SF, SB) order. The person-independent protocol trains a fresh model per
fold with one fencer held out; the random split holds out a fraction of
repetitions per (fencer, action) group. Reports carry per-fold accuracy,
the 6x6 confusion matrix, per-class accuracies (the row-normalized
diagonal), and every per-video vote so the aggregate numbers can be
recomputed independently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .data.pose import ACTIONS
from .data.splits import fencer_ids, split_pi, split_random
from .data.windows import DataConfig, build_window_set, windows_for_sequence
from .errors import ConfigError, DataError
from .models import ModelConfig, build_model, parameter_count
from .training import TrainConfig, train

NUM_CLASSES = len(ACTIONS)


def majority_vote(window_labels, num_classes: int = NUM_CLASSES):
    """Modal class and full vote counts; ties break to the lowest index."""
    labels = np.asarray(window_labels, dtype=np.int64)
    if labels.size == 0:
        raise DataError("majority vote over zero windows")
    counts = np.bincount(labels, minlength=num_classes)
    return int(np.argmax(counts)), counts


def predict_windows(model, window_data: np.ndarray) -> np.ndarray:
    """Argmax class per window, evaluated as one batch in eval mode."""
    logits = model.forward(T.Tensor(window_data), "eval")
    return np.argmax(logits.data, axis=1)


def predict_video(model, seq, data_config: DataConfig, root_seed: int = 0,
                  pad_target: int | None = None):
    """(predicted class, vote counts) for one video."""
    samples = windows_for_sequence(seq, data_config, root_seed, pad_target)
    data = np.stack([s.data for s in samples]).astype(np.float32)
    preds = predict_windows(model, data)
    return majority_vote(preds)


@dataclass
class EvaluationReport:
    variant: str = ""
    fold_results: list = field(default_factory=list)   # {"fold", "held_out_fencer", "accuracy", "videos"}
    per_video: list = field(default_factory=list)      # {"video_id", "fencer_id", "true", "predicted", "votes"}
    confusion: np.ndarray = field(default_factory=lambda: np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64))
    window_total: int = 0
    window_correct: int = 0
    model_params: int = 0

    @property
    def total_videos(self) -> int:
        return int(self.confusion.sum())

    @property
    def accuracy(self) -> float:
        # recomputed from the confusion matrix, not carried alongside it
        total = self.confusion.sum()
        return float(np.trace(self.confusion) / total) if total else float("nan")

    @property
    def window_accuracy(self) -> float:
        return self.window_correct / self.window_total if self.window_total else float("nan")

    def per_class_accuracy(self) -> dict:
        out = {}
        for i, action in enumerate(ACTIONS):
            row = self.confusion[i].sum()
            out[action] = float(self.confusion[i, i] / row) if row else float("nan")
        return out

    def confusion_percent(self) -> np.ndarray:
        rows = self.confusion.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(rows > 0, 100.0 * self.confusion / rows, np.nan)

    def add_video(self, video_id: str, fencer_id: int, true_label: int,
                  predicted: int, votes: np.ndarray):
        self.per_video.append({
            "video_id": video_id, "fencer_id": int(fencer_id),
            "true": ACTIONS[true_label], "predicted": ACTIONS[predicted],
            "votes": [int(v) for v in votes],
        })
        self.confusion[true_label, predicted] += 1

    def to_json_dict(self) -> dict:
        return {
            "variant": self.variant,
            "accuracy": self.accuracy,
            "window_accuracy": self.window_accuracy,
            "per_class_accuracy": self.per_class_accuracy(),
            "confusion_counts": self.confusion.tolist(),
            "confusion_percent": [[round(v, 1) if np.isfinite(v) else None for v in row]
                                  for row in self.confusion_percent()],
            "class_order": list(ACTIONS),
            "folds": self.fold_results,
            "model_params": self.model_params,
            "per_video": self.per_video,
        }

    def to_text(self) -> str:
        lines = []
        title = f"variant: {self.variant}" if self.variant else "evaluation"
        lines.append(title)
        lines.append(f"video accuracy: {100 * self.accuracy:.1f}%  "
                     f"({np.trace(self.confusion)}/{self.total_videos} videos)")
        lines.append(f"window accuracy: {100 * self.window_accuracy:.1f}%")
        if self.fold_results:
            folds = "  ".join(f"{f['held_out_fencer']}:{100 * f['accuracy']:.0f}%"
                              for f in self.fold_results)
            lines.append(f"per-fold (held-out fencer): {folds}")
        lines.append("")
        lines.append("confusion (row = true, % of row):")
        pct = self.confusion_percent()
        header = "      " + "".join(f"{a:>7}" for a in ACTIONS)
        lines.append(header)
        for i, action in enumerate(ACTIONS):
            cells = "".join(f"{pct[i, j]:7.1f}" if np.isfinite(pct[i, j]) else f"{'-':>7}"
                            for j in range(NUM_CLASSES))
            lines.append(f"{action:>4}  {cells}")
        lines.append("")
        lines.append("per-class accuracy: " + "  ".join(
            f"{a}={100 * v:.0f}%" if np.isfinite(v) else f"{a}=n/a"
            for a, v in self.per_class_accuracy().items()))
        return "\n".join(lines) + "\n"

    def confusion_csv(self) -> str:
        lines = ["true\\pred," + ",".join(ACTIONS)]
        for i, action in enumerate(ACTIONS):
            lines.append(action + "," + ",".join(str(int(v)) for v in self.confusion[i]))
        return "\n".join(lines) + "\n"

    def per_video_csv(self) -> str:
        header = "video_id,fencer_id,true,predicted," + ",".join(f"votes_{a}" for a in ACTIONS)
        lines = [header]
        for row in self.per_video:
            lines.append(",".join([row["video_id"], str(row["fencer_id"]), row["true"],
                                   row["predicted"]] + [str(v) for v in row["votes"]]))
        return "\n".join(lines) + "\n"


def _fold_seed(root_seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([root_seed, fold]).generate_state(1)[0])


def _evaluate_split(model, test_seqs, data_config, root_seed, pad_target, report):
    for seq in test_seqs:
        samples = windows_for_sequence(seq, data_config, root_seed, pad_target)
        data = np.stack([s.data for s in samples]).astype(np.float32)
        preds = predict_windows(model, data)
        predicted, votes = majority_vote(preds)
        report.add_video(seq.video_id, seq.fencer_id, seq.label, predicted, votes)
        report.window_total += len(preds)
        report.window_correct += int((preds == seq.label).sum())


def _with_input_length(model_config: ModelConfig, length: int) -> ModelConfig:
    cfg = ModelConfig.from_dict(model_config.to_dict())
    cfg.input_length = length
    return cfg


def _run_fold(sequences, held_out, fold_index, model_config, train_config,
              data_config, root_seed):
    train_seqs, test_seqs = split_pi(sequences, held_out)
    pad_target = None
    if data_config.padding == "zero_pad":
        # padded sample length (and hence the model's expected window length)
        # is fixed by the training split of this fold
        pad_target = max(s.num_frames for s in train_seqs)
        model_config = _with_input_length(model_config, pad_target)
    train_windows = build_window_set(train_seqs, data_config, root_seed, pad_target)
    fold_seed = _fold_seed(root_seed, fold_index)
    model = build_model(model_config, np.random.default_rng([fold_seed, 7]))
    fold_train_config = TrainConfig(**{**train_config.to_dict(), "seed": fold_seed})
    log = train(model, train_windows, fold_train_config)
    return model, log, test_seqs, pad_target


def run_cv_pi(sequences, model_config: ModelConfig, train_config: TrainConfig,
              data_config: DataConfig, root_seed: int = 0, variant: str = "",
              jobs: int = 1, progress=None):
    """Leave-one-fencer-out cross-validation; a fresh model per fold."""
    fencers = fencer_ids(sequences)
    if len(fencers) < 2:
        raise DataError("person-independent CV needs at least 2 fencers")
    report = EvaluationReport(variant=variant)
    logs = []
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        args = [(sequences, fencer, i, model_config, train_config, data_config, root_seed)
                for i, fencer in enumerate(fencers)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            fold_outputs = list(pool.map(_cv_fold_worker, args))
    else:
        fold_outputs = []
        for i, fencer in enumerate(fencers):
            fold_outputs.append(_cv_fold_worker(
                (sequences, fencer, i, model_config, train_config, data_config, root_seed)))
            if progress:
                progress(i + 1, len(fencers))
    for i, (fencer, log, video_rows, window_stats, params) in enumerate(fold_outputs):
        fold_correct = 0
        for row in video_rows:
            report.add_video(*row)
            if row[2] == row[3]:
                fold_correct += 1
        report.window_total += window_stats[0]
        report.window_correct += window_stats[1]
        report.fold_results.append({"fold": i, "held_out_fencer": fencer,
                                    "accuracy": fold_correct / len(video_rows),
                                    "videos": len(video_rows)})
        report.model_params = params
        logs.append(log)
    return report, logs


def _cv_fold_worker(args):
    sequences, fencer, fold_index, model_config, train_config, data_config, root_seed = args
    model, log, test_seqs, pad_target = _run_fold(
        sequences, fencer, fold_index, model_config, train_config, data_config, root_seed)
    video_rows = []
    window_total = 0
    window_correct = 0
    for seq in test_seqs:
        samples = windows_for_sequence(seq, data_config, root_seed, pad_target)
        data = np.stack([s.data for s in samples]).astype(np.float32)
        preds = predict_windows(model, data)
        predicted, votes = majority_vote(preds)
        video_rows.append((seq.video_id, seq.fencer_id, seq.label, predicted, votes))
        window_total += len(preds)
        window_correct += int((preds == seq.label).sum())
    return fencer, log, video_rows, (window_total, window_correct), parameter_count(model)


def run_random_split(sequences, model_config: ModelConfig, train_config: TrainConfig,
                     data_config: DataConfig, fraction: float = 0.2,
                     root_seed: int = 0, variant: str = ""):
    """Single train/test run with per-(fencer, action) held-out repetitions."""
    rng = np.random.default_rng([root_seed, 23])
    train_seqs, test_seqs = split_random(sequences, fraction, rng)
    pad_target = None
    if data_config.padding == "zero_pad":
        pad_target = max(s.num_frames for s in train_seqs)
        model_config = _with_input_length(model_config, pad_target)
    train_windows = build_window_set(train_seqs, data_config, root_seed, pad_target)
    model = build_model(model_config, np.random.default_rng([root_seed, 7]))
    log = train(model, train_windows, train_config)
    report = EvaluationReport(variant=variant or "random_split")
    _evaluate_split(model, test_seqs, data_config, root_seed, pad_target, report)
    report.model_params = parameter_count(model)
    report.fold_results.append({"fold": 0, "held_out_fencer": None,
                                "accuracy": report.accuracy,
                                "videos": report.total_videos})
    return report, [log]


ABLATION_VARIANTS = ("fencenet", "bifencenet", "reversed", "shuffled", "forward_x2",
                     "wide", "regular_conv1d", "zero_padding", "full_body", "lower_body")

_VARIANT_PRESETS = {
    "fencenet": "fencenet",
    "bifencenet": "bifencenet",
    "reversed": "fencenet_reversed",
    "shuffled": "fencenet_shuffled",
    "forward_x2": "bifencenet_forward2",
    "wide": "fencenet_wide",
    "regular_conv1d": "fencenet_regular_conv1d",
    "zero_padding": "fencenet_zero_padding",
    "full_body": "fencenet_full_body",
    "lower_body": "fencenet_lower_body",
}


def run_ablation_suite(sequences, variants, root_seed: int = 0,
                       train_overrides: dict | None = None, jobs: int = 1):
    """PI cross-validation for each requested variant; returns summary rows."""
    from .presets import load_preset, preset_configs
    rows = []
    reports = {}
    for name in variants:
        if name not in _VARIANT_PRESETS:
            raise ConfigError(f"unknown ablation variant {name!r}, "
                              f"expected one of {ABLATION_VARIANTS}")
        preset = load_preset(_VARIANT_PRESETS[name])
        model_config, data_config, train_config = preset_configs(preset, train_overrides)
        report, _ = run_cv_pi(sequences, model_config, train_config, data_config,
                              root_seed=root_seed, variant=name, jobs=jobs)
        per_class = report.per_class_accuracy()
        rows.append({
            "variant": name,
            "params_millions": round(report.model_params / 1e6, 2),
            "accuracy": round(100 * report.accuracy, 1),
            **{a: round(100 * per_class[a], 1) if np.isfinite(per_class[a]) else None
               for a in ACTIONS},
        })
        reports[name] = report
    return rows, reports


def ablation_table_text(rows) -> str:
    header = f"{'variant':<18}{'params(1e6)':>12}{'accuracy':>10}" + "".join(f"{a:>7}" for a in ACTIONS)
    lines = [header]
    for row in rows:
        cells = "".join(f"{row[a]:>7.1f}" if row[a] is not None else f"{'-':>7}" for a in ACTIONS)
        lines.append(f"{row['variant']:<18}{row['params_millions']:>12.2f}{row['accuracy']:>10.1f}{cells}")
    return "\n".join(lines) + "\n"


def write_report_files(report: EvaluationReport, out_dir, logs=None) -> dict:
    """Emit the JSON/text/CSV artifact set for one evaluation."""
    from pathlib import Path
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report_json": out_dir / "report.json",
        "report_txt": out_dir / "report.txt",
        "confusion_csv": out_dir / "confusion.csv",
        "per_video_csv": out_dir / "per_video.csv",
    }
    paths["report_json"].write_text(json.dumps(report.to_json_dict(), indent=2))
    paths["report_txt"].write_text(report.to_text())
    paths["confusion_csv"].write_text(report.confusion_csv())
    paths["per_video_csv"].write_text(report.per_video_csv())
    if logs:
        folds_dir = out_dir / "folds"
        folds_dir.mkdir(exist_ok=True)
        for i, log in enumerate(logs):
            (folds_dir / f"fold_{i:02d}_train_log.jsonl").write_text(log.to_jsonl())
    return {k: str(v) for k, v in paths.items()}
