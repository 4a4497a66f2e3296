"""Session-based HTTP API for interactive scribble segmentation.

JSON over HTTP; scribble classes are the strings "background" and
"foreground". Sessions live in memory with TTL eviction; each session has
at most one running segmentation job, executed on a worker thread with
cooperative cancellation at stop-criterion check boundaries.
"""

from __future__ import annotations

import io
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from PIL import Image

from .engine import PccParams, SegmentationResult, segment
from .errors import PccsegError
from .features import N_FEATURES, extract_features, normalize
from .ga import GaConfig, optimize_weights
from .graph import UNLABELED

_CLASS_CODES = {"background": 0, "foreground": 1}


@dataclass
class Session:
    session_id: str
    image: np.ndarray
    created: float
    touched: float
    scribbles: dict[int, int] = field(default_factory=dict)  # flat pixel -> class
    state: str = "idle"  # idle | running | done | failed
    progress: dict = field(default_factory=dict)
    error: Optional[str] = None
    result: Optional[SegmentationResult] = None
    mask_png: Optional[bytes] = None
    cancel: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)
    thread: Optional[threading.Thread] = None


class SessionStore:
    def __init__(self, ttl: float = 3600.0):
        self.ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _evict(self) -> None:
        now = time.monotonic()
        for sid in [s for s, sess in self._sessions.items()
                    if now - sess.touched > self.ttl]:
            self._sessions.pop(sid, None)

    def create(self, image: np.ndarray) -> Session:
        sess = Session(session_id=uuid.uuid4().hex, image=image,
                       created=time.monotonic(), touched=time.monotonic())
        with self._lock:
            self._evict()
            self._sessions[sess.session_id] = sess
        return sess

    def get(self, sid: str) -> Optional[Session]:
        with self._lock:
            self._evict()
            sess = self._sessions.get(sid)
            if sess is not None:
                sess.touched = time.monotonic()
            return sess

    def delete(self, sid: str) -> Optional[Session]:
        with self._lock:
            return self._sessions.pop(sid, None)


def _json_error(status: int, detail: str) -> JSONResponse:
    return JSONResponse({"detail": detail}, status_code=status)


def _run_job(sess: Session, options: dict) -> None:
    try:
        h, w = sess.image.shape[:2]
        pixel_labels = np.full(h * w, UNLABELED, dtype=np.int8)
        for pix, cls in sess.scribbles.items():
            pixel_labels[pix] = cls

        k = int(options.get("k", 100))
        seed = int(options.get("seed", 0))
        params = PccParams(**options.get("pcc_params", {}))
        params.rng_seed = seed

        fm = normalize(extract_features(sess.image))
        mode = options.get("lambda_mode", "unit")
        baseline_phi = None
        if mode == "explicit":
            lam = np.asarray(options["weights"], dtype=np.float64)
        elif mode == "optimize":
            cfg = GaConfig(**options.get("ga", {}))
            cfg.rng_seed = seed
            lam, _, baseline_phi = optimize_weights(fm, pixel_labels, k, cfg)
        else:
            lam = np.ones(N_FEATURES)

        def progress(rnd: int, mean_max: float, frac: float) -> None:
            sess.progress = {"round": rnd, "mean_max_domination": mean_max,
                             "fraction_finalized": frac}

        result = segment(sess.image, pixel_labels, lam, k, params=params,
                         baseline_phi=baseline_phi, fm_normalized=fm,
                         progress=progress, should_cancel=lambda: sess.cancel)
        if sess.cancel:
            sess.state = "failed"
            sess.error = "cancelled"
            return
        buf = io.BytesIO()
        Image.fromarray(result.mask, mode="L").save(buf, format="PNG")
        sess.result = result
        sess.mask_png = buf.getvalue()
        sess.state = "done"
    except (PccsegError, KeyError, ValueError, TypeError) as exc:
        sess.state = "failed"
        sess.error = str(exc)
    except Exception as exc:
        sess.state = "failed"
        sess.error = f"internal error: {exc}"


def create_app(static_dir: Optional[str] = None, max_pixels: int = 1 << 22,
               session_ttl: float = 3600.0) -> FastAPI:
    app = FastAPI(title="pccseg")
    store = SessionStore(ttl=session_ttl)
    app.state.store = store

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.body()
        if not body:
            return _json_error(400, "empty upload")
        try:
            with Image.open(io.BytesIO(body)) as im:
                image = np.asarray(im.convert("RGB"))
        except Exception:
            return _json_error(400, "undecodable image")
        if image.shape[0] * image.shape[1] > max_pixels:
            return _json_error(413, f"image exceeds {max_pixels} pixels")
        sess = store.create(image)
        return {"session_id": sess.session_id,
                "width": image.shape[1], "height": image.shape[0]}

    @app.post("/api/sessions/{sid}/scribbles")
    async def add_scribbles(sid: str, request: Request):
        sess = store.get(sid)
        if sess is None:
            return _json_error(404, "unknown session")
        with sess.lock:
            if sess.state == "running":
                return _json_error(409, "job running")
            batch = await request.json()
            if not isinstance(batch, list):
                return _json_error(400, "expected a JSON array of scribbles")
            h, w = sess.image.shape[:2]
            accepted = 0
            rejected = []
            for idx, item in enumerate(batch):
                try:
                    x, y = int(item["x"]), int(item["y"])
                    cls = _CLASS_CODES[item["class"]]
                except (KeyError, TypeError, ValueError):
                    rejected.append(idx)
                    continue
                if not (0 <= x < w and 0 <= y < h):
                    rejected.append(idx)
                    continue
                sess.scribbles[y * w + x] = cls  # last write wins
                accepted += 1
            return {"accepted": accepted, "rejected_indices": rejected}

    @app.post("/api/sessions/{sid}/segment", status_code=202)
    async def start_segmentation(sid: str, request: Request):
        sess = store.get(sid)
        if sess is None:
            return _json_error(404, "unknown session")
        with sess.lock:
            if sess.state == "running":
                return _json_error(409, "job already running")
            classes = set(sess.scribbles.values())
            if classes != {0, 1}:
                missing = [name for name, code in _CLASS_CODES.items()
                           if code not in classes]
                return _json_error(422, f"missing scribbles for: {', '.join(missing)}")
            body = await request.body()
            options = (await request.json()) if body else {}
            sess.state = "running"
            sess.cancel = False
            sess.progress = {}
            sess.error = None
            sess.thread = threading.Thread(target=_run_job, args=(sess, options),
                                           daemon=True)
            sess.thread.start()
        return {"status": "accepted"}

    @app.get("/api/sessions/{sid}/status")
    async def get_status(sid: str):
        sess = store.get(sid)
        if sess is None:
            return _json_error(404, "unknown session")
        payload = {"state": sess.state, "progress": sess.progress}
        if sess.error:
            payload["error"] = sess.error
        if sess.state == "done" and sess.result is not None:
            payload["result"] = {
                "alpha": sess.result.alpha,
                "phi": sess.result.phi,
                "sigma": sess.result.sigma,
                "rounds": sess.result.rounds,
                "stop_reason": sess.result.stop_reason,
                "seed": sess.result.seed,
                "k": sess.result.k,
                "lam": list(sess.result.lam),
            }
        return payload

    @app.get("/api/sessions/{sid}/mask")
    async def get_mask(sid: str):
        sess = store.get(sid)
        if sess is None:
            return _json_error(404, "unknown session")
        if sess.state != "done" or sess.mask_png is None:
            return _json_error(409, "no completed job")
        return Response(content=sess.mask_png, media_type="image/png",
                        headers={"X-Alpha": repr(sess.result.alpha),
                                 "X-Rounds": str(sess.result.rounds)})

    @app.delete("/api/sessions/{sid}")
    async def delete_session(sid: str):
        sess = store.delete(sid)
        if sess is None:
            return _json_error(404, "unknown session")
        sess.cancel = True
        return {"status": "deleted"}

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
