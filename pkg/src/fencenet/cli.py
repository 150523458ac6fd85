"""Command-line front end.

Subcommands mirror the pipeline: `synth`, `train`, `crossval`, `ablation`,
`predict`, `validate`, plus `serve` to launch the HTTP service. Every run
writes its fully-resolved config beside its outputs. With `--server URL`
the data-processing subcommands run on a remote service instead of in
process (the CLI becomes a thin HTTP client; files are still written
locally for synth/predict).

Exit codes: 0 ok, 2 input/config error, 3 shape/compatibility error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, DataError, NumericError, ShapeError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SHAPE = 3
EXIT_NUMERIC = 4


def _add_run_arguments(p: argparse.ArgumentParser, crossval: bool = False):
    p.add_argument("--manifest", required=True, help="dataset manifest (JSONL)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--preset", default="fencenet", help="named preset (see `fencenet presets`)")
    p.add_argument("--config", default=None, help="JSON run config file; flags override its fields")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--keypoints", choices=["default9", "full13", "lower6"], default=None)
    p.add_argument("--sampling", choices=["stride", "random"], default=None)
    p.add_argument("--padding", choices=["sample", "zero_pad"], default=None)
    p.add_argument("--transform", choices=["forward", "reversed", "shuffled"], default=None)
    if crossval:
        p.add_argument("--protocol", choices=["pi", "random"], default="pi")
        p.add_argument("--fraction", type=float, default=0.2,
                       help="held-out share per (fencer, action) for --protocol random")
        p.add_argument("--jobs", type=int, default=1, help="parallel fold workers")
    p.add_argument("--server", default=None, help="run on a fencenet service at this base URL")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fencenet",
                                     description="fencing footwork classification pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--fencers", type=int, default=10)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--server", default=None)

    _add_run_arguments(sub.add_parser("train", help="train one model"))
    _add_run_arguments(sub.add_parser("crossval", help="cross-validated evaluation"), crossval=True)

    p = sub.add_parser("ablation", help="run a set of named variants under PI CV")
    _add_run_arguments(p)
    p.add_argument("--variants", required=True,
                   help="comma-separated variant names (e.g. fencenet,reversed,shuffled)")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("predict", help="per-video predictions from a checkpoint")
    p.add_argument("--checkpoint", required=True, help="checkpoint directory from `train`")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None, help="predictions CSV path (default: stdout)")
    p.add_argument("--server", default=None)

    p = sub.add_parser("validate", help="parse and summarize a manifest")
    p.add_argument("--manifest", required=True)

    sub.add_parser("presets", help="list bundled presets")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--artifacts", default="fencenet_artifacts",
                   help="directory for server-side job outputs")

    return parser


def _require_manifest(path: str):
    if not Path(path).exists():
        print(f"manifest not found: {path}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _overrides(args) -> dict:
    return {
        "train": {"epochs": args.epochs, "batch_size": args.batch_size,
                  "learning_rate": args.lr},
        "data": {"keypoints": args.keypoints, "sampling": args.sampling,
                 "padding": args.padding, "transform": args.transform},
    }


def _resolve(args, jobs: int = 1, fraction: float = 0.2):
    from . import pipeline
    ov = _overrides(args)
    return pipeline.resolve_run_config(
        manifest=args.manifest, out_dir=args.out, preset=args.preset,
        seed=args.seed, jobs=jobs, fraction=fraction, config_file=args.config,
        train_overrides=ov["train"], data_overrides=ov["data"])


def _run(args) -> int:
    from . import pipeline

    if args.command == "presets":
        from .presets import list_presets, load_preset
        for name in list_presets():
            print(f"{name:<26} {load_preset(name).get('description', '')}")
        return EXIT_OK

    if args.command == "validate":
        _require_manifest(args.manifest)
        print(json.dumps(pipeline.validate_manifest(args.manifest), indent=2))
        return EXIT_OK

    if args.command == "serve":
        import uvicorn
        from .service.app import create_app
        uvicorn.run(create_app(artifacts_root=args.artifacts),
                    host=args.host, port=args.port, log_level="info")
        return EXIT_OK

    if getattr(args, "server", None):
        return _run_remote(args)

    if args.command == "synth":
        result = pipeline.run_synth(args.out, args.fencers, args.reps, args.seed)
        print(json.dumps(result, indent=2))
        return EXIT_OK

    if args.command == "train":
        _require_manifest(args.manifest)
        result = pipeline.run_train(_resolve(args))
        print(json.dumps(result, indent=2))
        return EXIT_OK

    if args.command == "crossval":
        _require_manifest(args.manifest)
        cfg = _resolve(args, jobs=args.jobs, fraction=args.fraction)
        result = pipeline.run_crossval(cfg, protocol=args.protocol)
        print(json.dumps(result, indent=2))
        return EXIT_OK

    if args.command == "ablation":
        _require_manifest(args.manifest)
        cfg = _resolve(args, jobs=args.jobs)
        variants = [v.strip() for v in args.variants.split(",") if v.strip()]
        result = pipeline.run_ablation(cfg, variants, train_overrides=_overrides(args)["train"])
        print(json.dumps(result, indent=2))
        return EXIT_OK

    if args.command == "predict":
        _require_manifest(args.manifest)
        result = pipeline.run_predict(args.checkpoint, args.manifest, args.out)
        if args.out:
            print(json.dumps({"videos": result["videos"],
                              "predictions_csv": result["predictions_csv"]}, indent=2))
        else:
            print(result["csv"], end="")
        return EXIT_OK

    raise ConfigError(f"unknown command {args.command!r}")


def _run_remote(args) -> int:
    """Thin-client mode: forward the run to a fencenet service."""
    from .service import client

    base = args.server.rstrip("/")
    if args.command == "synth":
        result = client.synth(base, args.fencers, args.reps, args.seed)
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(result.pop("manifest_jsonl"))
        result["manifest"] = args.out
        print(json.dumps(result, indent=2))
        return EXIT_OK

    if args.command in ("train", "crossval"):
        _require_manifest(args.manifest)
        kind = args.command
        payload = {
            "preset": args.preset,
            "manifest_jsonl": Path(args.manifest).read_text(),
            "seed": args.seed,
            "overrides": _overrides(args),
        }
        if kind == "crossval":
            payload["protocol"] = args.protocol
            payload["jobs"] = args.jobs
            payload["fraction"] = args.fraction
        job = client.submit_job(base, kind, payload)
        final = client.wait_for_job(base, job["job_id"])
        print(json.dumps(final, indent=2))
        return EXIT_OK if final["status"] == "done" else EXIT_INPUT

    if args.command == "predict":
        _require_manifest(args.manifest)
        result = client.predict(base, checkpoint_dir=args.checkpoint,
                                manifest_jsonl=Path(args.manifest).read_text())
        csv_text = result["csv"]
        if args.out:
            Path(args.out).write_text(csv_text)
            print(json.dumps({"videos": result["videos"], "predictions_csv": args.out}, indent=2))
        else:
            print(csv_text, end="")
        return EXIT_OK

    raise ConfigError(f"command {args.command!r} has no remote mode")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    except ShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DataError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
