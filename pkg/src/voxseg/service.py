"""HTTP facade for the interactive workflow.

Routes (all JSON unless noted):

    GET    /volumes                                  volume catalog
    GET    /volumes/{vid}/slice?plane&index&window&level   8-bit PNG
    POST   /sessions {"volume_id": ...}              open a session
    GET    /sessions/{sid}                           session state
    POST   /sessions/{sid}/strokes                   accumulate stroke JSON
    DELETE /sessions/{sid}/strokes                   clear strokes
    POST   /sessions/{sid}/segment {"max_iters"?}    run GrowCut
    GET    /sessions/{sid}/segment                   poll a long run
    GET    /sessions/{sid}/overlay?plane&index       RGBA PNG of the mask
    POST   /sessions/{sid}/ground_truth              {"path"} or raw NRRD bytes
    GET    /sessions/{sid}/metrics                   CaseMetrics vs ground truth
    POST   /sessions/{sid}/save                      JSON snapshot to disk
    GET    /masks/{mask_id}                          NRRD bytes

Status codes: 400 malformed body, 404 unknown volume/session/mask, 409 when a
segmentation is already running on the session, 422 for engine preconditions
(ConflictingSeed, EmptyForeground, dimension mismatches).

Sessions are in-memory; volumes are immutable and shared.  Segmentation runs
synchronously inside the request up to a time budget, then detaches and
returns 202 with a poll URL.
"""
from __future__ import annotations

import hashlib
import io
import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import (
    ConflictingSeed,
    DimsMismatch,
    EmptyForeground,
    IndexOutOfRange,
    NonPositiveWindow,
    NrrdError,
    OutOfRange,
    VoxsegError,
)
from .grid import LabelGrid, VolumeGrid, extract_slice, window_level
from .growcut import GrowCutParams, SeedSet, Stroke, segment, strokes_to_seeds
from .metrics import compare_masks
from .nrrd_io import read_nrrd, write_nrrd
from .pipeline import ALG

DEFAULT_WINDOW = 2000.0
DEFAULT_LEVEL = 400.0
OVERLAY_RGBA = (0, 255, 0, 128)     # foreground mask: green at 50% alpha


class ApiError(Exception):
    def __init__(self, status: int, error: str, message: str):
        super().__init__(message)
        self.status = status
        self.error = error
        self.message = message


def _not_found(what: str, key: str) -> ApiError:
    return ApiError(404, "NotFound", f"unknown {what}: {key}")


def _engine_error(exc: VoxsegError) -> ApiError:
    return ApiError(422, type(exc).__name__, str(exc))


@dataclass
class Session:
    session_id: str
    volume_id: str
    strokes: list[Stroke] = field(default_factory=list)
    seeds: SeedSet = field(default_factory=lambda: SeedSet.from_entries([]))
    latest_mask_id: str | None = None
    ground_truth: LabelGrid | None = None
    segmenting: bool = False
    last_run: dict | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class Workbench:
    """Shared state behind the routes: volume catalog, sessions, mask store."""

    def __init__(self, data_dir: Path, segment_timeout: float = 120.0):
        self.data_dir = Path(data_dir)
        self.segment_timeout = segment_timeout
        self._volumes: dict[str, VolumeGrid] = {}
        self._volume_lock = threading.Lock()
        self.sessions: dict[str, Session] = {}
        self.masks: dict[str, LabelGrid] = {}
        self._store_lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=2)

    def volume_ids(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.nrrd"))

    def volume(self, volume_id: str) -> VolumeGrid:
        with self._volume_lock:
            if volume_id not in self._volumes:
                path = self.data_dir / f"{volume_id}.nrrd"
                if not path.exists():
                    raise _not_found("volume", volume_id)
                grid = read_nrrd(path)
                if not isinstance(grid, VolumeGrid):
                    raise _not_found("volume", volume_id)
                self._volumes[volume_id] = grid
            return self._volumes[volume_id]

    def session(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise _not_found("session", session_id) from None

    def store_mask(self, mask: LabelGrid) -> str:
        payload = write_nrrd(mask)
        mask_id = hashlib.sha256(payload).hexdigest()[:16]
        with self._store_lock:
            self.masks[mask_id] = mask
        return mask_id


def _png(array: np.ndarray) -> Response:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(array).save(buf, format="PNG")
    return Response(content=buf.getvalue(), media_type="image/png")


async def _json_body(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ApiError(400, "MalformedBody", f"body is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ApiError(400, "MalformedBody", "expected a JSON object")
    return doc


def _parse_strokes(doc: dict) -> list[Stroke]:
    try:
        return [
            Stroke(
                plane=e["plane"],
                index=int(e["index"]),
                pixels=[(int(u), int(v)) for u, v in e["pixels"]],
                label=e["label"],
            )
            for e in doc["strokes"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ApiError(400, "MalformedBody", f"bad stroke payload: {exc}") from None


def create_app(
    data_dir: str | Path,
    segment_timeout: float = 120.0,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    bench = Workbench(Path(data_dir), segment_timeout=segment_timeout)
    app = FastAPI(title="voxseg workbench")
    app.state.bench = bench
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def _api_error(request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.error, "message": exc.message}
        )

    @app.get("/volumes")
    def list_volumes():
        out = []
        for vid in bench.volume_ids():
            try:
                vol = bench.volume(vid)
            except ApiError:
                continue        # masks and non-subset files are not catalog entries
            out.append({"id": vid, "dims": list(vol.dims), "spacing": list(vol.spacing)})
        return out

    @app.get("/volumes/{vid}/slice")
    def get_slice(
        vid: str,
        plane: str = "axial",
        index: int = 0,
        window: float = DEFAULT_WINDOW,
        level: float = DEFAULT_LEVEL,
    ):
        vol = bench.volume(vid)
        try:
            img = window_level(extract_slice(vol, plane, index), window, level)
        except (IndexOutOfRange, NonPositiveWindow, ValueError) as exc:
            raise ApiError(422, type(exc).__name__, str(exc)) from None
        return _png(img)

    @app.post("/sessions", status_code=201)
    async def open_session(request: Request):
        doc = await _json_body(request)
        if "volume_id" not in doc:
            raise ApiError(400, "MalformedBody", "missing volume_id")
        vid = str(doc["volume_id"])
        bench.volume(vid)      # 404 on unknown volume
        session = Session(session_id=uuid.uuid4().hex[:12], volume_id=vid)
        bench.sessions[session.session_id] = session
        return _session_json(session)

    def _session_json(session: Session) -> dict:
        return {
            "id": session.session_id,
            "volume_id": session.volume_id,
            "stroke_count": len(session.strokes),
            "seeds": [
                [int(x), int(y), int(z), int(l)]
                for (x, y, z), l in session.seeds.entries
            ],
            "latest_mask_id": session.latest_mask_id,
            "ground_truth_registered": session.ground_truth is not None,
            "segmenting": session.segmenting,
        }

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return _session_json(bench.session(sid))

    @app.post("/sessions/{sid}/strokes")
    async def post_strokes(sid: str, request: Request):
        session = bench.session(sid)
        strokes = _parse_strokes(await _json_body(request))
        vol = bench.volume(session.volume_id)
        with session.lock:
            try:
                incoming = strokes_to_seeds(strokes, vol.dims)
                merged = session.seeds.merge(incoming)
            except (ConflictingSeed, OutOfRange) as exc:
                raise _engine_error(exc) from None
            except ValueError as exc:
                raise ApiError(400, "MalformedBody", str(exc)) from None
            session.strokes.extend(strokes)
            session.seeds = merged
        return _session_json(session)

    @app.delete("/sessions/{sid}/strokes")
    def delete_strokes(sid: str):
        session = bench.session(sid)
        with session.lock:
            session.strokes = []
            session.seeds = SeedSet.from_entries([])
        return _session_json(session)

    def _run_segmentation(session: Session, vol: VolumeGrid, params: GrowCutParams):
        try:
            result = segment(vol, session.seeds, params)
            mask_id = bench.store_mask(result.mask)
            run = {
                "status": "done",
                "mask_id": mask_id,
                "iterations": result.iterations,
                "elapsed_seconds": result.elapsed_seconds,
                "converged": result.converged,
            }
            with session.lock:
                session.latest_mask_id = mask_id
                session.last_run = run
        except Exception as exc:
            run = {"status": "error", "error": type(exc).__name__, "message": str(exc)}
            with session.lock:
                session.last_run = run
        finally:
            session.segmenting = False
        return run

    @app.post("/sessions/{sid}/segment")
    async def post_segment(sid: str, request: Request):
        session = bench.session(sid)
        doc = await _json_body(request)
        max_iters = doc.get("max_iters")
        if max_iters is not None and (not isinstance(max_iters, int) or max_iters < 1):
            raise ApiError(400, "MalformedBody", "max_iters must be a positive integer")
        vol = bench.volume(session.volume_id)
        with session.lock:
            if session.segmenting:
                raise ApiError(409, "SegmentationRunning", "session is already segmenting")
            if session.seeds.foreground_count() == 0:
                raise _engine_error(EmptyForeground("no foreground strokes painted"))
            session.segmenting = True
        params = GrowCutParams(max_iterations=max_iters)
        future = bench._pool.submit(_run_segmentation, session, vol, params)
        try:
            run = future.result(timeout=bench.segment_timeout)
        except (FutureTimeout, TimeoutError):
            return JSONResponse(
                status_code=202,
                content={"status": "running", "poll": f"/sessions/{sid}/segment"},
            )
        if run["status"] == "error":
            raise ApiError(422, run["error"], run["message"])
        return run

    @app.get("/sessions/{sid}/segment")
    def poll_segment(sid: str):
        session = bench.session(sid)
        if session.segmenting:
            return {"status": "running", "poll": f"/sessions/{sid}/segment"}
        if session.last_run is None:
            raise _not_found("segmentation run", sid)
        return session.last_run

    @app.get("/masks/{mask_id}")
    def get_mask(mask_id: str):
        try:
            mask = bench.masks[mask_id]
        except KeyError:
            raise _not_found("mask", mask_id) from None
        return Response(
            content=write_nrrd(mask), media_type="application/octet-stream"
        )

    @app.get("/sessions/{sid}/overlay")
    def get_overlay(sid: str, plane: str = "axial", index: int = 0):
        session = bench.session(sid)
        if session.latest_mask_id is None:
            raise _not_found("mask for session", sid)
        mask = bench.masks[session.latest_mask_id]
        try:
            sl = extract_slice(mask, plane, index)
        except (IndexOutOfRange, ValueError) as exc:
            raise ApiError(422, type(exc).__name__, str(exc)) from None
        rgba = np.zeros((sl.height, sl.width, 4), dtype=np.uint8)
        rgba[sl.samples != 0] = OVERLAY_RGBA
        return _png(rgba)

    @app.post("/sessions/{sid}/ground_truth")
    async def post_ground_truth(sid: str, request: Request):
        session = bench.session(sid)
        vol = bench.volume(session.volume_id)
        content_type = request.headers.get("content-type", "")
        try:
            if content_type.startswith("application/octet-stream"):
                from .nrrd_io import parse_nrrd

                grid = parse_nrrd(await request.body())
            else:
                doc = await _json_body(request)
                if "path" not in doc:
                    raise ApiError(400, "MalformedBody", "missing path or NRRD upload")
                path = Path(doc["path"])
                if not path.is_absolute():
                    path = bench.data_dir / path
                if not path.exists():
                    raise _not_found("ground truth file", str(path))
                grid = read_nrrd(path)
        except NrrdError as exc:
            raise ApiError(400, type(exc).__name__, str(exc)) from None
        if not isinstance(grid, LabelGrid):
            raise ApiError(422, "NotAMask", "ground truth must be a uchar mask")
        if grid.dims != vol.dims:
            raise _engine_error(
                DimsMismatch(f"mask dims {grid.dims} != volume dims {vol.dims}")
            )
        with session.lock:
            session.ground_truth = grid
        return _session_json(session)

    @app.get("/sessions/{sid}/metrics")
    def get_metrics(sid: str):
        session = bench.session(sid)
        if session.ground_truth is None:
            raise _not_found("ground truth for session", sid)
        if session.latest_mask_id is None:
            raise _not_found("mask for session", sid)
        mask = bench.masks[session.latest_mask_id]
        elapsed = (session.last_run or {}).get("elapsed_seconds", 0.0)
        try:
            metrics = compare_masks(mask, session.ground_truth, elapsed_seconds=elapsed)
        except VoxsegError as exc:
            raise _engine_error(exc) from None
        doc = asdict(metrics)
        doc["a"] = ALG
        doc["b"] = "ground_truth"
        return doc

    @app.post("/sessions/{sid}/save")
    def save_session(sid: str):
        session = bench.session(sid)
        out_dir = bench.data_dir / "sessions"
        out_dir.mkdir(parents=True, exist_ok=True)
        snapshot = {
            "saved_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "session": _session_json(session),
            "strokes": [
                {
                    "plane": s.plane,
                    "index": s.index,
                    "label": s.label,
                    "pixels": [[u, v] for u, v in s.pixels],
                }
                for s in session.strokes
            ],
        }
        path = out_dir / f"{sid}.json"
        path.write_text(json.dumps(snapshot, indent=1))
        return {"path": str(path)}

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
