"""HTTP preview and job service backing the path-studio UI.

GET endpoints are pure functions of their URL, so responses are cacheable.
The job queue is strictly serialized (one worker, meshing is memory-heavy)
and job records live for the process lifetime; resubmitting a config with
an identical hash returns the existing job.
"""

from __future__ import annotations

import base64
import io
import tempfile
import threading
import queue as queue_mod
from pathlib import Path
from typing import Dict, Optional

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from PIL import Image

from . import exprlang, families
from .cli import ConfigError, config_from_dict, run_job
from .core import ParamInterval, PathSpec
from .raster import RasterConfig, JULIA_WINDOW, Window, mandelbrot_membership_grid, rasterize_escape

__all__ = ["app", "serve", "DEFAULT_PORT"]

DEFAULT_PORT = 8737
PREVIEW_RESOLUTION = 192
PREVIEW_MAX_ITER = 200
MAX_PREVIEW_SAMPLES = 64
MAX_TILE_PX = 2048

app = FastAPI(title="stackforge", version="0.1.0")
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


def _png_bytes(values: np.ndarray) -> bytes:
    """Encode a y-up uint8 grid as PNG (flipping rows to image order)."""
    buf = io.BytesIO()
    Image.fromarray(values[::-1], mode="L").save(buf, format="PNG")
    return buf.getvalue()


@app.get("/api/mandelbrot")
def mandelbrot_tile(
    x_min: float = -2.0,
    x_max: float = 1.0,
    y_min: float = -1.5,
    y_max: float = 1.5,
    px: int = 256,
    max_iter: int = PREVIEW_MAX_ITER,
):
    if px < 1 or px > MAX_TILE_PX:
        raise HTTPException(status_code=400, detail=f"px must be in [1, {MAX_TILE_PX}]")
    if not (x_max > x_min and y_max > y_min):
        raise HTTPException(status_code=400, detail="window must have positive area")
    if max_iter < 1:
        raise HTTPException(status_code=400, detail="max_iter must be >= 1")
    window = Window(x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max)
    values = mandelbrot_membership_grid(window, px, max_iter)
    return Response(content=_png_bytes(values), media_type="image/png")


def _path_spec_from_json(body: dict) -> PathSpec:
    try:
        kind = body["kind"]
        t_min = float(body.get("t_min", 0.0))
        t_max = float(body.get("t_max", np.pi))
        trim = float(body.get("trim_epsilon", 0.0))
        points = None
        if body.get("points") is not None:
            points = tuple(complex(float(p[0]), float(p[1])) for p in body["points"])
        return PathSpec(
            kind=kind,
            t_range=ParamInterval(t_min, t_max, 2),
            trim_epsilon=trim,
            points=points,
            x_expr=body.get("x"),
            y_expr=body.get("y"),
        )
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise HTTPException(status_code=400, detail=f"invalid path: {err}") from None


@app.post("/api/path/preview")
def path_preview(body: dict = Body(...)):
    samples = int(body.get("samples", 9))
    if not 2 <= samples <= MAX_PREVIEW_SAMPLES:
        raise HTTPException(
            status_code=400, detail=f"samples must be in [2, {MAX_PREVIEW_SAMPLES}]"
        )
    spec = _path_spec_from_json(body.get("path", {}))
    rsec = body.get("raster") or {}
    try:
        rcfg = RasterConfig(
            resolution=int(rsec.get("resolution", PREVIEW_RESOLUTION)),
            window=JULIA_WINDOW,
            supersample=int(rsec.get("supersample", 2)),
        )
        max_iter = int(rsec.get("max_iter", PREVIEW_MAX_ITER))
        escape = families.EscapeParams(max_iter=max_iter)
    except ValueError as err:
        raise HTTPException(status_code=400, detail=str(err)) from None
    if rcfg.resolution > 512:
        raise HTTPException(status_code=400, detail="preview resolution capped at 512")

    ts = spec.sample_ts(samples)
    try:
        cs = families.path_points(spec, ts)
    except exprlang.ExprError as err:
        raise HTTPException(status_code=400, detail=str(err)) from None
    frames = []
    for t, c in zip(ts, cs):
        raster = rasterize_escape(complex(c), escape, rcfg)
        frames.append(
            {
                "t": float(t),
                "c_re": float(c.real),
                "c_im": float(c.imag),
                "png_base64": base64.b64encode(_png_bytes(raster.values)).decode("ascii"),
            }
        )
    return {"frames": frames}


class _JobRecord:
    __slots__ = ("job_id", "status", "progress", "error", "stl_path")

    def __init__(self, job_id: str):
        self.job_id = job_id
        self.status = "queued"
        self.progress = 0.0
        self.error: Optional[str] = None
        self.stl_path: Optional[Path] = None


_jobs: Dict[str, _JobRecord] = {}
_jobs_lock = threading.Lock()
_job_queue: "queue_mod.Queue" = queue_mod.Queue()
_worker_started = False
_jobs_root: Optional[Path] = None


def _ensure_worker():
    global _worker_started, _jobs_root
    with _jobs_lock:
        if _worker_started:
            return
        _jobs_root = Path(tempfile.mkdtemp(prefix="stackforge-jobs-"))
        thread = threading.Thread(target=_worker_loop, daemon=True, name="stackforge-jobs")
        thread.start()
        _worker_started = True


def _worker_loop():
    while True:
        job_id, cfg = _job_queue.get()
        record = _jobs[job_id]
        record.status = "running"
        record.progress = 0.1
        try:
            sink = io.StringIO()
            record.progress = 0.2
            stl = run_job(cfg, out=sink)
            record.stl_path = stl
            record.progress = 1.0
            record.status = "done"
        except Exception as err:  # failures land in the record, not the log
            record.error = str(err)
            record.status = "failed"
        finally:
            _job_queue.task_done()


@app.post("/api/jobs")
def submit_job(body: dict = Body(...)):
    _ensure_worker()
    try:
        cfg = config_from_dict(body)
    except ConfigError as err:
        raise HTTPException(status_code=400, detail=str(err)) from None
    job_id = cfg.generation_fingerprint()[:12]
    with _jobs_lock:
        if job_id in _jobs:
            return Response(
                content=f'{{"job_id": "{job_id}"}}',
                status_code=409,
                media_type="application/json",
            )
        # run inside a private directory so jobs never clobber user paths
        job_dir = _jobs_root / job_id
        cfg.frames_dir = job_dir / "frames"
        cfg.stl_path = job_dir / "model.stl"
        _jobs[job_id] = _JobRecord(job_id)
    _job_queue.put((job_id, cfg))
    return {"job_id": job_id}


@app.get("/api/jobs/{job_id}")
def job_status(job_id: str):
    record = _jobs.get(job_id)
    if record is None:
        raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
    out = {"status": record.status, "progress": record.progress}
    if record.error:
        out["error"] = record.error
    if record.status == "done":
        out["stl_url"] = f"/api/jobs/{job_id}/model.stl"
    return out


@app.get("/api/jobs/{job_id}/model.stl")
def job_model(job_id: str):
    record = _jobs.get(job_id)
    if record is None:
        raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
    if record.status != "done" or record.stl_path is None:
        raise HTTPException(status_code=404, detail=f"job {job_id!r} has no model yet")
    return Response(
        content=record.stl_path.read_bytes(), media_type="application/octet-stream"
    )


def serve(host: str = "127.0.0.1", port: int = DEFAULT_PORT):
    import uvicorn

    uvicorn.run(app, host=host, port=port)
