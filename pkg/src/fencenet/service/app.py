"""FastAPI service wrapping the pipeline.

Quick operations (synth, predict, validate) answer inline; training and
cross-validation run as background jobs under an artifacts root, polled
via GET /jobs/{id} and downloadable via GET /jobs/{id}/files/{name}.
Job state lives in process memory; artifacts persist on disk.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse

from .. import __version__, pipeline
from ..errors import ConfigError, DataError, NumericError, ShapeError
from ..presets import list_presets, load_preset
from . import schemas


class JobRegistry:
    def __init__(self, root: Path):
        self.root = root
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()

    def create(self, kind: str) -> dict:
        job_id = uuid.uuid4().hex[:12]
        job = {"job_id": job_id, "kind": kind, "status": "queued",
               "error": None, "result": None}
        with self._lock:
            self._jobs[job_id] = job
        return job

    def get(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"no such job {job_id}")
        return job

    def update(self, job_id: str, **fields):
        with self._lock:
            self._jobs[job_id].update(fields)

    def job_dir(self, job_id: str) -> Path:
        return self.root / "jobs" / job_id

    def files(self, job_id: str) -> list[str]:
        d = self.job_dir(job_id)
        if not d.exists():
            return []
        return sorted(str(p.relative_to(d)) for p in d.rglob("*") if p.is_file())


def _error_status(exc: Exception) -> int:
    if isinstance(exc, (ConfigError, DataError, ValueError, FileNotFoundError)):
        return 400
    if isinstance(exc, ShapeError):
        return 409
    if isinstance(exc, NumericError):
        return 500
    return 500


def create_app(artifacts_root: str = "fencenet_artifacts") -> FastAPI:
    app = FastAPI(title="fencenet", version=__version__,
                  description="fencing footwork classification service")
    root = Path(artifacts_root)
    root.mkdir(parents=True, exist_ok=True)
    registry = JobRegistry(root)
    app.state.registry = registry

    def _materialize_manifest(job_dir: Path, manifest_path, manifest_jsonl) -> str:
        if manifest_jsonl:
            job_dir.mkdir(parents=True, exist_ok=True)
            path = job_dir / "manifest.jsonl"
            path.write_text(manifest_jsonl)
            return str(path)
        if manifest_path:
            if not Path(manifest_path).exists():
                raise FileNotFoundError(f"manifest not found: {manifest_path}")
            return manifest_path
        raise ConfigError("either manifest_path or manifest_jsonl is required")

    def _launch(kind: str, req: schemas.JobRequest) -> schemas.JobCreated:
        job = registry.create(kind)
        job_id = job["job_id"]
        job_dir = registry.job_dir(job_id)

        def work():
            registry.update(job_id, status="running")
            try:
                manifest = _materialize_manifest(job_dir, req.manifest_path, req.manifest_jsonl)
                cfg = pipeline.resolve_run_config(
                    manifest=manifest, out_dir=str(job_dir / "out"), preset=req.preset,
                    seed=req.seed, jobs=req.jobs, fraction=req.fraction,
                    model_overrides=req.overrides.model or None,
                    data_overrides=req.overrides.data or None,
                    train_overrides=req.overrides.train or None)
                if kind == "train":
                    result = pipeline.run_train(cfg)
                elif kind == "crossval":
                    result = pipeline.run_crossval(cfg, protocol=req.protocol)
                elif kind == "ablation":
                    result = pipeline.run_ablation(cfg, req.variants or ["fencenet"],
                                                   train_overrides=req.overrides.train or None)
                else:
                    raise ConfigError(f"unknown job kind {kind}")
                registry.update(job_id, status="done", result=result)
            except Exception as exc:  # job errors surface via status, not a crash
                registry.update(job_id, status="error", error=f"{type(exc).__name__}: {exc}")

        threading.Thread(target=work, daemon=True).start()
        return schemas.JobCreated(job_id=job_id, kind=kind, status="queued",
                                  status_url=f"/jobs/{job_id}")

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.get("/presets", response_model=list[schemas.PresetInfo])
    def presets():
        out = []
        for name in list_presets():
            preset = load_preset(name)
            out.append(schemas.PresetInfo(name=name,
                                          description=preset.get("description", ""),
                                          kind=preset["model"]["kind"]))
        return out

    @app.post("/synth", response_model=schemas.SynthResponse)
    def synth(req: schemas.SynthRequest):
        from ..data.pose import sequence_to_json_line
        from ..data.synth import generate_dataset
        sequences = generate_dataset(req.num_fencers, req.reps_per_action, req.seed)
        manifest = "\n".join(sequence_to_json_line(s) for s in sequences) + "\n"
        return schemas.SynthResponse(videos=len(sequences), fencers=req.num_fencers,
                                     reps_per_action=req.reps_per_action, seed=req.seed,
                                     manifest_jsonl=manifest)

    @app.post("/jobs/train", response_model=schemas.JobCreated)
    def submit_train(req: schemas.JobRequest):
        return _launch("train", req)

    @app.post("/jobs/crossval", response_model=schemas.JobCreated)
    def submit_crossval(req: schemas.JobRequest):
        return _launch("crossval", req)

    @app.post("/jobs/ablation", response_model=schemas.JobCreated)
    def submit_ablation(req: schemas.JobRequest):
        return _launch("ablation", req)

    @app.get("/jobs/{job_id}", response_model=schemas.JobStatus)
    def job_status(job_id: str):
        job = registry.get(job_id)
        return schemas.JobStatus(**job, files=registry.files(job_id))

    @app.get("/jobs/{job_id}/files/{name:path}")
    def job_file(job_id: str, name: str):
        registry.get(job_id)
        path = (registry.job_dir(job_id) / name).resolve()
        if not str(path).startswith(str(registry.job_dir(job_id).resolve())):
            raise HTTPException(status_code=400, detail="path escapes the job directory")
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"no such file {name}")
        return FileResponse(path)

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest):
        try:
            checkpoint = req.checkpoint_dir
            if req.job_id:
                job = registry.get(req.job_id)
                if job["status"] != "done" or job["kind"] != "train":
                    raise ConfigError(f"job {req.job_id} is not a finished train job")
                checkpoint = job["result"]["checkpoint"]
            if not checkpoint:
                raise ConfigError("either checkpoint_dir or job_id is required")
            scratch = root / "predict" / uuid.uuid4().hex[:8]
            manifest = _materialize_manifest(scratch, req.manifest_path, req.manifest_jsonl)
            result = pipeline.run_predict(checkpoint, manifest)
            rows = [schemas.PredictRow(**r) for r in result["rows"]]
            return schemas.PredictResponse(videos=result["videos"], rows=rows,
                                           csv=result["csv"])
        except HTTPException:
            raise
        except Exception as exc:
            raise HTTPException(status_code=_error_status(exc),
                                detail=f"{type(exc).__name__}: {exc}")

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest):
        try:
            scratch = root / "validate" / uuid.uuid4().hex[:8]
            manifest = _materialize_manifest(scratch, req.manifest_path, req.manifest_jsonl)
            return schemas.ValidateResponse(**pipeline.validate_manifest(manifest))
        except HTTPException:
            raise
        except Exception as exc:
            raise HTTPException(status_code=_error_status(exc),
                                detail=f"{type(exc).__name__}: {exc}")

    return app
