"""Run orchestration shared by the CLI and the HTTP service.

Every run resolves to a fully-expanded RunConfig that is written beside
its outputs as `resolved_config.json`; re-running from that file
reproduces the artifacts bit for bit. Artifact layout under the output
directory:

    resolved_config.json          always
    checkpoint/params.fnt         train: binary parameter file
    checkpoint/model.json         train: model config + preprocessing config
    train_log.jsonl               train: one epoch per line + final checksum
    report.json / report.txt      crossval / random split / ablation
    confusion.csv, per_video.csv  crossval / random split
    folds/fold_XX_train_log.jsonl crossval
    ablation.json / ablation.txt  ablation suite
    predictions.csv               predict
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .data.pose import load_manifest, save_manifest
from .data.synth import generate_dataset
from .data.windows import DataConfig, build_window_set
from .errors import ConfigError, DataError
from .evaluation import (
    ablation_table_text,
    majority_vote,
    predict_windows,
    run_ablation_suite,
    run_cv_pi,
    run_random_split,
    write_report_files,
)
from .data.windows import windows_for_sequence
from .models import ModelConfig, build_model, load_checkpoint, parameter_count, save_checkpoint
from .presets import load_preset, preset_configs
from .training import TrainConfig, train


@dataclass
class RunConfig:
    manifest: str
    out_dir: str
    preset: str = "fencenet"
    seed: int = 0
    jobs: int = 1
    fraction: float = 0.2   # random-split holdout share
    model: ModelConfig = None
    data: DataConfig = None
    train: TrainConfig = None

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "out_dir": self.out_dir,
            "preset": self.preset,
            "seed": self.seed,
            "jobs": self.jobs,
            "fraction": self.fraction,
            "model": self.model.to_dict(),
            "data": asdict(self.data),
            "train": self.train.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        return cls(
            manifest=obj["manifest"], out_dir=obj["out_dir"],
            preset=obj.get("preset", "fencenet"), seed=obj.get("seed", 0),
            jobs=obj.get("jobs", 1), fraction=obj.get("fraction", 0.2),
            model=ModelConfig.from_dict(obj["model"]),
            data=DataConfig(**obj["data"]),
            train=TrainConfig.from_dict(obj["train"]),
        )


def resolve_run_config(manifest: str, out_dir: str, preset: str = "fencenet",
                       seed: int = 0, jobs: int = 1, fraction: float = 0.2,
                       config_file: str | None = None,
                       model_overrides: dict | None = None,
                       data_overrides: dict | None = None,
                       train_overrides: dict | None = None) -> RunConfig:
    """Expand a preset (or an explicit config file) plus overrides into a RunConfig."""
    if config_file:
        base = json.loads(Path(config_file).read_text())
        preset_dict = base if "model" in base else load_preset(base.get("preset", preset))
        preset = base.get("preset", base.get("name", preset))
    else:
        preset_dict = load_preset(preset)
    model_config, data_config, train_config = preset_configs(
        preset_dict, train_overrides, data_overrides, model_overrides)
    train_config.seed = seed
    return RunConfig(manifest=manifest, out_dir=out_dir, preset=preset, seed=seed,
                     jobs=jobs, fraction=fraction, model=model_config,
                     data=data_config, train=train_config)


def _prepare_out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.json").write_text(json.dumps(cfg.to_dict(), indent=2))
    return out


def _load_sequences(manifest: str):
    path = Path(manifest)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {manifest}")
    sequences = load_manifest(path)
    if not sequences:
        raise DataError(f"manifest {manifest} contains no videos")
    return sequences


def run_synth(out_path: str, num_fencers: int = 10, reps_per_action: int = 10,
              seed: int = 0) -> dict:
    sequences = generate_dataset(num_fencers, reps_per_action, seed)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_manifest(sequences, out)
    return {"manifest": str(out), "videos": len(sequences),
            "fencers": num_fencers, "reps_per_action": reps_per_action, "seed": seed}


def run_train(cfg: RunConfig) -> dict:
    out = _prepare_out_dir(cfg)
    sequences = _load_sequences(cfg.manifest)
    model_config = cfg.model
    pad_target = None
    if cfg.data.padding == "zero_pad":
        pad_target = max(s.num_frames for s in sequences)
        model_config = ModelConfig.from_dict(model_config.to_dict())
        model_config.input_length = pad_target
    windows = build_window_set(sequences, cfg.data, cfg.seed, pad_target)
    model = build_model(model_config, np.random.default_rng([cfg.seed, 7]))
    log = train(model, windows, cfg.train)
    checkpoint_dir = out / "checkpoint"
    save_checkpoint(checkpoint_dir, model, extra={
        "data": asdict(cfg.data), "seed": cfg.seed, "pad_target": pad_target,
    })
    (out / "train_log.jsonl").write_text(log.to_jsonl())
    return {
        "out_dir": str(out),
        "checkpoint": str(checkpoint_dir),
        "train_log": str(out / "train_log.jsonl"),
        "parameters": parameter_count(model),
        "checksum": log.checksum,
        "final_loss": log.final_loss(),
        "windows": len(windows),
    }


def run_crossval(cfg: RunConfig, protocol: str = "pi") -> dict:
    out = _prepare_out_dir(cfg)
    sequences = _load_sequences(cfg.manifest)
    if protocol == "pi":
        report, logs = run_cv_pi(sequences, cfg.model, cfg.train, cfg.data,
                                 root_seed=cfg.seed, variant=cfg.preset, jobs=cfg.jobs)
    elif protocol == "random":
        report, logs = run_random_split(sequences, cfg.model, cfg.train, cfg.data,
                                        fraction=cfg.fraction, root_seed=cfg.seed,
                                        variant=cfg.preset)
    else:
        raise ConfigError(f"unknown protocol {protocol!r}, expected pi or random")
    paths = write_report_files(report, out, logs)
    return {
        "out_dir": str(out),
        "accuracy": report.accuracy,
        "window_accuracy": report.window_accuracy,
        "per_class_accuracy": report.per_class_accuracy(),
        "folds": report.fold_results,
        "parameters": report.model_params,
        **paths,
    }


def run_ablation(cfg: RunConfig, variants, train_overrides: dict | None = None) -> dict:
    """Each variant keeps its preset's train config unless explicitly overridden."""
    out = _prepare_out_dir(cfg)
    sequences = _load_sequences(cfg.manifest)
    rows, reports = run_ablation_suite(sequences, variants, root_seed=cfg.seed,
                                       train_overrides=train_overrides, jobs=cfg.jobs)
    (out / "ablation.json").write_text(json.dumps(rows, indent=2))
    (out / "ablation.txt").write_text(ablation_table_text(rows))
    for name, report in reports.items():
        write_report_files(report, out / name)
    return {"out_dir": str(out), "rows": rows,
            "ablation_json": str(out / "ablation.json"),
            "ablation_txt": str(out / "ablation.txt")}


def run_predict(checkpoint_dir: str, manifest: str, out_csv: str | None = None) -> dict:
    model, payload = load_checkpoint(checkpoint_dir)
    data_config = DataConfig(**payload.get("data", {}))
    root_seed = payload.get("seed", 0)
    pad_target = payload.get("pad_target")
    sequences = _load_sequences(manifest)
    from .data.pose import ACTIONS
    rows = []
    for seq in sequences:
        samples = windows_for_sequence(seq, data_config, root_seed, pad_target)
        data = np.stack([s.data for s in samples]).astype(np.float32)
        preds = predict_windows(model, data)
        predicted, votes = majority_vote(preds)
        rows.append({"video_id": seq.video_id, "predicted": ACTIONS[predicted],
                     "votes": [int(v) for v in votes]})
    csv_text = "video_id,predicted," + ",".join(f"votes_{a}" for a in ACTIONS) + "\n"
    for row in rows:
        csv_text += ",".join([row["video_id"], row["predicted"]]
                             + [str(v) for v in row["votes"]]) + "\n"
    result = {"rows": rows, "videos": len(rows)}
    if out_csv:
        out = Path(out_csv)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(csv_text)
        result["predictions_csv"] = str(out)
    result["csv"] = csv_text
    return result


def validate_manifest(manifest: str) -> dict:
    """Parse and validate a manifest; summary counts per action and fencer."""
    sequences = _load_sequences(manifest)
    from collections import Counter
    actions = Counter(s.action for s in sequences)
    fencers = Counter(s.fencer_id for s in sequences)
    frame_counts = [s.num_frames for s in sequences]
    return {
        "videos": len(sequences),
        "actions": dict(sorted(actions.items())),
        "fencers": {str(k): v for k, v in sorted(fencers.items())},
        "frames_min": int(min(frame_counts)),
        "frames_max": int(max(frame_counts)),
    }
