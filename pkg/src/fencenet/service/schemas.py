"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class PresetInfo(BaseModel):
    name: str
    description: str = ""
    kind: str
    parameters_hint: Optional[float] = None


class SynthRequest(BaseModel):
    num_fencers: int = Field(default=10, ge=1, le=100)
    reps_per_action: int = Field(default=10, ge=1, le=200)
    seed: int = 0


class SynthResponse(BaseModel):
    videos: int
    fencers: int
    reps_per_action: int
    seed: int
    manifest_jsonl: str


class Overrides(BaseModel):
    train: dict = Field(default_factory=dict)
    data: dict = Field(default_factory=dict)
    model: dict = Field(default_factory=dict)


class JobRequest(BaseModel):
    preset: str = "fencenet"
    manifest_path: Optional[str] = None
    manifest_jsonl: Optional[str] = None
    seed: int = 0
    jobs: int = 1
    protocol: str = "pi"          # crossval only: pi | random
    fraction: float = 0.2         # crossval only, protocol=random
    variants: Optional[list[str]] = None   # ablation only
    overrides: Overrides = Field(default_factory=Overrides)


class JobCreated(BaseModel):
    job_id: str
    kind: str
    status: str
    status_url: str


class JobStatus(BaseModel):
    job_id: str
    kind: str
    status: str                   # queued | running | done | error
    error: Optional[str] = None
    result: Optional[dict] = None
    files: list[str] = Field(default_factory=list)


class PredictRequest(BaseModel):
    checkpoint_dir: Optional[str] = None
    job_id: Optional[str] = None   # use the checkpoint of a finished train job
    manifest_path: Optional[str] = None
    manifest_jsonl: Optional[str] = None


class PredictRow(BaseModel):
    video_id: str
    predicted: str
    votes: list[int]


class PredictResponse(BaseModel):
    videos: int
    rows: list[PredictRow]
    csv: str


class ValidateRequest(BaseModel):
    manifest_path: Optional[str] = None
    manifest_jsonl: Optional[str] = None


class ValidateResponse(BaseModel):
    videos: int
    actions: dict
    fencers: dict
    frames_min: int
    frames_max: int
