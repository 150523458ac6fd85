import json
from pathlib import Path

import pytest

from fencenet.cli import main

MINI = ["--preset", "fencenet_mini"]


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def synth_manifest(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "synth.jsonl"
    code = run_cli("synth", "--out", str(path), "--fencers", "3", "--reps", "2", "--seed", "7")
    assert code == 0
    return path


@pytest.fixture(scope="module")
def trained(tmp_path_factory, synth_manifest):
    out = tmp_path_factory.mktemp("run") / "train_out"
    code = run_cli("train", "--manifest", str(synth_manifest), "--out", str(out),
                   *MINI, "--epochs", "2", "--seed", "3")
    assert code == 0
    return out


class TestSynth:
    def test_line_count_and_parse(self, synth_manifest):
        from fencenet.data import load_manifest
        lines = synth_manifest.read_text().strip().splitlines()
        assert len(lines) == 3 * 6 * 2
        assert len(load_manifest(synth_manifest)) == 36

    def test_seeded_reproducibility(self, tmp_path, synth_manifest):
        other = tmp_path / "again.jsonl"
        assert run_cli("synth", "--out", str(other), "--fencers", "3", "--reps", "2",
                       "--seed", "7") == 0
        assert other.read_bytes() == synth_manifest.read_bytes()


class TestTrain:
    def test_artifacts_exist(self, trained):
        assert (trained / "checkpoint" / "params.fnt").exists()
        assert (trained / "checkpoint" / "model.json").exists()
        assert (trained / "train_log.jsonl").exists()
        assert (trained / "resolved_config.json").exists()

    def test_same_command_reproduces_checkpoint(self, tmp_path, synth_manifest):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli("train", "--manifest", str(synth_manifest), "--out", str(out),
                           *MINI, "--epochs", "1", "--seed", "11") == 0
            outs.append((out / "checkpoint" / "params.fnt").read_bytes())
        assert outs[0] == outs[1]

    def test_missing_manifest_exits_2(self, tmp_path, capsys):
        code = run_cli("train", "--manifest", str(tmp_path / "nope.jsonl"),
                       "--out", str(tmp_path / "o"), *MINI)
        assert code == 2
        assert "manifest not found" in capsys.readouterr().err

    def test_rerun_from_resolved_config_matches(self, trained, tmp_path, synth_manifest):
        resolved = json.loads((trained / "resolved_config.json").read_text())
        rerun_dir = tmp_path / "rerun"
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps(resolved))
        assert run_cli("train", "--manifest", str(synth_manifest), "--out", str(rerun_dir),
                       "--config", str(cfg_file), "--seed", str(resolved["seed"])) == 0
        assert (rerun_dir / "checkpoint" / "params.fnt").read_bytes() == \
            (trained / "checkpoint" / "params.fnt").read_bytes()


class TestCrossval:
    def test_report_with_folds(self, tmp_path, synth_manifest):
        out = tmp_path / "cv"
        assert run_cli("crossval", "--manifest", str(synth_manifest), "--out", str(out),
                       *MINI, "--epochs", "1", "--seed", "5") == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report["folds"]) == 3
        assert report["variant"] == "fencenet_mini"
        assert (out / "folds" / "fold_00_train_log.jsonl").exists()

    def test_variant_label_from_preset(self, tmp_path, synth_manifest):
        out = tmp_path / "cvr"
        assert run_cli("crossval", "--manifest", str(synth_manifest), "--out", str(out),
                       *MINI, "--epochs", "1", "--transform", "reversed") == 0
        report = json.loads((out / "report.json").read_text())
        assert report["variant"] == "fencenet_mini"
        resolved = json.loads((out / "resolved_config.json").read_text())
        assert resolved["data"]["transform"] == "reversed"

    def test_json_accuracy_matches_csv_recount(self, tmp_path, synth_manifest):
        out = tmp_path / "cv2"
        assert run_cli("crossval", "--manifest", str(synth_manifest), "--out", str(out),
                       *MINI, "--epochs", "1", "--seed", "9") == 0
        report = json.loads((out / "report.json").read_text())
        rows = (out / "per_video.csv").read_text().strip().splitlines()[1:]
        correct = sum(1 for row in rows if row.split(",")[2] == row.split(",")[3])
        assert report["accuracy"] == pytest.approx(correct / len(rows))

    def test_random_protocol(self, tmp_path, synth_manifest):
        out = tmp_path / "cvrand"
        assert run_cli("crossval", "--manifest", str(synth_manifest), "--out", str(out),
                       *MINI, "--epochs", "1", "--protocol", "random", "--fraction", "0.5") == 0
        report = json.loads((out / "report.json").read_text())
        assert report["folds"][0]["held_out_fencer"] is None


class TestPredict:
    def test_overfit_model_matches_labels(self, tmp_path, synth_manifest):
        out = tmp_path / "overfit"
        # long enough to memorize 36 tiny videos
        assert run_cli("train", "--manifest", str(synth_manifest), "--out", str(out),
                       *MINI, "--epochs", "100", "--lr", "5e-3", "--seed", "1") == 0
        preds_csv = tmp_path / "preds.csv"
        assert run_cli("predict", "--checkpoint", str(out / "checkpoint"),
                       "--manifest", str(synth_manifest), "--out", str(preds_csv)) == 0
        from fencenet.data import load_manifest
        labels = {s.video_id: s.action for s in load_manifest(synth_manifest)}
        rows = preds_csv.read_text().strip().splitlines()[1:]
        assert len(rows) == len(labels)
        agree = sum(1 for row in rows
                    if labels[row.split(",")[0]] == row.split(",")[1])
        assert agree == len(labels)

    def test_empty_manifest_exits_2(self, tmp_path, trained, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        code = run_cli("predict", "--checkpoint", str(trained / "checkpoint"),
                       "--manifest", str(empty))
        assert code == 2

    def test_corrupt_checkpoint_exits_3(self, tmp_path, trained, synth_manifest):
        import shutil
        broken = tmp_path / "broken_ckpt"
        shutil.copytree(trained / "checkpoint", broken)
        payload = json.loads((broken / "model.json").read_text())
        payload["model"]["dense_hidden"] = 7
        (broken / "model.json").write_text(json.dumps(payload))
        code = run_cli("predict", "--checkpoint", str(broken),
                       "--manifest", str(synth_manifest))
        assert code == 3


class TestAblationAndMisc:
    def test_ablation_rows(self, tmp_path, synth_manifest):
        out = tmp_path / "abl"
        assert run_cli("ablation", "--manifest", str(synth_manifest), "--out", str(out),
                       "--variants", "fencenet,shuffled", "--epochs", "1") == 0
        rows = json.loads((out / "ablation.json").read_text())
        assert [r["variant"] for r in rows] == ["fencenet", "shuffled"]

    def test_unknown_variant_exits_2(self, tmp_path, synth_manifest, capsys):
        code = run_cli("ablation", "--manifest", str(synth_manifest),
                       "--out", str(tmp_path / "x"), "--variants", "bogus")
        assert code == 2

    def test_validate(self, synth_manifest, capsys):
        assert run_cli("validate", "--manifest", str(synth_manifest)) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["videos"] == 36
        assert set(summary["actions"]) == {"R", "IS", "WW", "JS", "SF", "SB"}

    def test_presets_listing(self, capsys):
        assert run_cli("presets") == 0
        out = capsys.readouterr().out
        assert "fencenet" in out and "bifencenet" in out

    def test_unknown_preset_exits_2(self, tmp_path, synth_manifest, capsys):
        code = run_cli("train", "--manifest", str(synth_manifest),
                       "--out", str(tmp_path / "o"), "--preset", "nonexistent")
        assert code == 2
        assert "unknown preset" in capsys.readouterr().err
