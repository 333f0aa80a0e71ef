"""Local HTTP service backing the annotation review UI.

Exposes ingested sequences, per-sequence ROI storage, background pipeline
runs with polled job status, and the annotation/flag review endpoints.
Results served here are produced by the same pipeline entry points as the
CLI, so byte-level outputs are identical for identical configuration.
"""

from __future__ import annotations

import io
import json
import threading
import uuid
from dataclasses import asdict, dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from PIL import Image

from .config import load_pipeline_config
from .errors import LinemarkError
from .frames import roi_from_json_dict, validate_roi
from .pipeline import read_coords, run_sequence
from .workspace import Workspace

VERDICTS = ("accepted", "flagged")


@dataclass
class JobStatus:
    job_id: str
    sequence_id: str
    state: str  # queued | running | done | failed
    frames_done: int = 0
    frames_total: int = 0
    error: str | None = None


class JobManager:
    """Owns job state; one run at a time per sequence, others queue behind it.

    Statuses persist to ``jobs.json`` on every state transition; jobs found
    unfinished at startup are marked failed (the process that ran them is
    gone).
    """

    def __init__(self, workspace: Workspace):
        self._ws = workspace
        self._lock = threading.Lock()
        self._seq_locks: dict[str, threading.Lock] = {}
        self._jobs: dict[str, JobStatus] = {}
        self._load()

    def _load(self) -> None:
        if self._ws.jobs_path.is_file():
            with open(self._ws.jobs_path, encoding="utf-8") as fh:
                for job_id, raw in json.load(fh).items():
                    status = JobStatus(**raw)
                    if status.state in ("queued", "running"):
                        status.state = "failed"
                        status.error = "interrupted by service restart"
                    self._jobs[job_id] = status
            self._persist()

    def _persist(self) -> None:
        with open(self._ws.jobs_path, "w", encoding="utf-8") as fh:
            json.dump({jid: asdict(s) for jid, s in self._jobs.items()}, fh, indent=2)
            fh.write("\n")

    def _seq_lock(self, seq_id: str) -> threading.Lock:
        with self._lock:
            return self._seq_locks.setdefault(seq_id, threading.Lock())

    def get(self, job_id: str) -> JobStatus | None:
        with self._lock:
            return self._jobs.get(job_id)

    def submit(self, seq_id: str) -> JobStatus:
        entry = self._ws.get_entry(seq_id)
        if entry is None:
            raise KeyError(seq_id)
        roi = self._ws.load_roi(seq_id)
        if roi is None:
            raise LinemarkError(f"no ROI stored for sequence '{seq_id}'")

        status = JobStatus(
            job_id=uuid.uuid4().hex[:12],
            sequence_id=seq_id,
            state="queued",
            frames_total=entry.frame_count,
        )
        with self._lock:
            self._jobs[status.job_id] = status
            self._persist()

        worker = threading.Thread(target=self._run, args=(status, roi), daemon=True)
        worker.start()
        return status

    def _run(self, status: JobStatus, roi) -> None:
        with self._seq_lock(status.sequence_id):
            self._transition(status, "running")
            try:
                seq = self._ws.open_sequence(status.sequence_id)
                cfg = load_pipeline_config(
                    self._ws.config_path if self._ws.config_path.is_file() else None
                )

                def progress(done: int, _total: int) -> None:
                    status.frames_done = done

                run_sequence(seq, roi, cfg, self._ws.out_root, progress=progress)
                self._transition(status, "done")
            except Exception as exc:
                status.error = str(exc)
                self._transition(status, "failed")

    def _transition(self, status: JobStatus, state: str) -> None:
        with self._lock:
            status.state = state
            self._persist()


def create_app(workspace: str | Path, static_dir: str | Path | None = None) -> FastAPI:
    ws = Workspace(workspace)
    jobs = JobManager(ws)
    app = FastAPI(title="linemark review service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def entry_or_404(seq_id: str):
        entry = ws.get_entry(seq_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown sequence '{seq_id}'")
        return entry

    @app.get("/api/sequences")
    def list_sequences():
        return [e.to_json_dict() for e in ws.list_sequences()]

    @app.get("/api/sequences/{seq_id}/frames/{index}")
    def get_frame(seq_id: str, index: int):
        entry = entry_or_404(seq_id)
        if not (0 <= index < entry.frame_count):
            raise HTTPException(status_code=404, detail="frame index out of range")
        png = Path(entry.dir) / f"frame_{index:06d}.png"
        if png.is_file():
            return Response(content=png.read_bytes(), media_type="image/png")
        ppm = Path(entry.dir) / f"frame_{index:06d}.ppm"
        if ppm.is_file():
            buf = io.BytesIO()
            with Image.open(ppm) as im:
                im.convert("RGB").save(buf, format="PNG")
            return Response(content=buf.getvalue(), media_type="image/png")
        raise HTTPException(status_code=404, detail="frame file missing")

    @app.get("/api/sequences/{seq_id}/roi")
    def get_roi(seq_id: str):
        entry_or_404(seq_id)
        roi = ws.load_roi(seq_id)
        if roi is None:
            raise HTTPException(status_code=404, detail="no ROI stored")
        return roi.to_json_dict()

    @app.post("/api/sequences/{seq_id}/roi")
    def post_roi(seq_id: str, body: dict):
        entry = entry_or_404(seq_id)
        try:
            roi = roi_from_json_dict(body)
        except LinemarkError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        violations = validate_roi(roi, (entry.width, entry.height))
        if violations:
            raise HTTPException(status_code=422, detail="; ".join(violations))
        ws.store_roi(seq_id, roi)
        return roi.to_json_dict()

    @app.post("/api/sequences/{seq_id}/run", status_code=202)
    def start_run(seq_id: str):
        entry_or_404(seq_id)
        try:
            status = jobs.submit(seq_id)
        except LinemarkError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"job_id": status.job_id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        status = jobs.get(job_id)
        if status is None:
            raise HTTPException(status_code=404, detail="unknown job")
        return asdict(status)

    @app.get("/api/sequences/{seq_id}/annotations/{index}")
    def get_annotation(seq_id: str, index: int):
        entry_or_404(seq_id)
        coords = ws.out_root / seq_id / "coords" / f"frame_{index:06d}.txt"
        if not coords.is_file():
            raise HTTPException(status_code=404, detail="frame not annotated")
        pixels = read_coords(coords)
        return {"present": len(pixels) > 0, "pixels": pixels.tolist()}

    @app.get("/api/sequences/{seq_id}/annotations/{index}/overlay")
    def get_overlay(seq_id: str, index: int):
        entry_or_404(seq_id)
        overlay = ws.out_root / seq_id / "overlays" / f"frame_{index:06d}.png"
        if not overlay.is_file():
            raise HTTPException(status_code=404, detail="frame not annotated")
        return Response(content=overlay.read_bytes(), media_type="image/png")

    def read_flags(seq_id: str) -> dict:
        path = ws.flags_path(seq_id)
        if not path.is_file():
            return {}
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    @app.get("/api/sequences/{seq_id}/flags/{index}")
    def get_flag(seq_id: str, index: int):
        entry_or_404(seq_id)
        flag = read_flags(seq_id).get(str(index))
        if flag is None:
            raise HTTPException(status_code=404, detail="frame not flagged")
        return flag

    @app.put("/api/sequences/{seq_id}/flags/{index}")
    def put_flag(seq_id: str, index: int, body: dict):
        entry = entry_or_404(seq_id)
        if not (0 <= index < entry.frame_count):
            raise HTTPException(status_code=404, detail="frame index out of range")
        verdict = body.get("verdict")
        if verdict not in VERDICTS:
            raise HTTPException(status_code=422, detail=f"verdict must be one of {VERDICTS}")
        flags = read_flags(seq_id)
        flag = {"frame_index": index, "verdict": verdict, "note": body.get("note")}
        flags[str(index)] = flag  # latest wins
        path = ws.flags_path(seq_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(flags, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return flag

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
