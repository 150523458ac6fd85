"""Minimal HTTP client for the fencenet service (stdlib only).

Used by the CLI's --server mode; keeps the client dependency-free so the
core package never needs an HTTP library.
"""

from __future__ import annotations

import json
import time
import urllib.error
import urllib.request


def _request(method: str, url: str, payload: dict | None = None) -> dict:
    data = json.dumps(payload).encode("utf-8") if payload is not None else None
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=600) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", errors="replace")
        raise OSError(f"service error {exc.code} at {url}: {detail}") from exc
    except urllib.error.URLError as exc:
        raise OSError(f"cannot reach service at {url}: {exc.reason}") from exc


def synth(base: str, num_fencers: int, reps_per_action: int, seed: int) -> dict:
    return _request("POST", f"{base}/synth", {
        "num_fencers": num_fencers, "reps_per_action": reps_per_action, "seed": seed})


def submit_job(base: str, kind: str, payload: dict) -> dict:
    return _request("POST", f"{base}/jobs/{kind}", payload)


def job_status(base: str, job_id: str) -> dict:
    return _request("GET", f"{base}/jobs/{job_id}")


def wait_for_job(base: str, job_id: str, poll_seconds: float = 0.5,
                 timeout: float = 24 * 3600.0) -> dict:
    deadline = time.monotonic() + timeout
    while True:
        status = job_status(base, job_id)
        if status["status"] in ("done", "error"):
            return status
        if time.monotonic() > deadline:
            raise OSError(f"job {job_id} did not finish within {timeout}s")
        time.sleep(poll_seconds)


def predict(base: str, checkpoint_dir: str | None = None, job_id: str | None = None,
            manifest_jsonl: str | None = None, manifest_path: str | None = None) -> dict:
    return _request("POST", f"{base}/predict", {
        "checkpoint_dir": checkpoint_dir, "job_id": job_id,
        "manifest_jsonl": manifest_jsonl, "manifest_path": manifest_path})
