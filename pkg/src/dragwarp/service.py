"""Stateful HTTP service for interactive drag editing sessions.

Each session holds the current base image, the working mask and control
pairs, the cached preview, and a bounded history of committed rounds.
Mutations invalidate the preview cache; repeated previews without state
changes return byte-identical payloads. Sessions are in-memory with idle
eviction; export/import of cases is the CLI's job.
"""
from __future__ import annotations

import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .cases import ServiceConfig, validate_pairs_in_bounds
from .errors import BackendNotFoundError, InvalidInputError
from .inpaint import BackendRegistry, InpaintRequest, run_backend
from .pngio import (
    decode_image_png,
    decode_mask_png,
    encode_image_png,
    encode_mask_png,
    resize_long_edge,
    to_b64,
)
from .refine import RefineConfig, RemoteSegmenter, Segmenter, refine
from .warp import ControlPair, WarpConfig, WarpOutput, render_warp


@dataclass
class Session:
    id: str
    base_image: np.ndarray
    mask: np.ndarray
    pairs: list[ControlPair] = dc_field(default_factory=list)
    last_preview: WarpOutput | None = None
    preview_payload: dict[str, Any] | None = None
    pending_edit: np.ndarray | None = None
    history: deque = dc_field(default_factory=lambda: deque(maxlen=8))
    round: int = 0
    warp_config: WarpConfig = dc_field(default_factory=WarpConfig)
    refine_config: RefineConfig = dc_field(default_factory=RefineConfig)
    last_access: float = 0.0
    lock: threading.RLock = dc_field(default_factory=threading.RLock)

    def invalidate_preview(self) -> None:
        self.last_preview = None
        self.preview_payload = None


class SessionStore:
    def __init__(self, ttl_seconds: float, history_bound: int):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._ttl = ttl_seconds
        self._history_bound = history_bound

    def create(self, image: np.ndarray) -> Session:
        session = Session(
            id=uuid.uuid4().hex,
            base_image=image,
            mask=np.zeros(image.shape[:2], dtype=bool),
            history=deque(maxlen=self._history_bound),
            last_access=time.monotonic(),
        )
        with self._lock:
            self._evict_expired()
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._evict_expired()
            session = self._sessions.get(session_id)
            if session is None:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
            session.last_access = time.monotonic()
            return session

    def _evict_expired(self) -> None:
        if self._ttl <= 0:
            return
        now = time.monotonic()
        for sid in [s for s, sess in self._sessions.items() if now - sess.last_access > self._ttl]:
            del self._sessions[sid]


def create_app(
    config: ServiceConfig | None = None,
    segmenter: Segmenter | None = None,
    registry: BackendRegistry | None = None,
    backend_transport=None,
) -> FastAPI:
    """Build the service; test doubles can be injected for the segmenter,
    the backend registry and the outbound HTTP transport."""
    config = config or ServiceConfig()
    if registry is None:
        registry = BackendRegistry.from_endpoints(config.backend_endpoints)
    if segmenter is None and config.segmenter_url:
        segmenter = RemoteSegmenter(config.segmenter_url)

    app = FastAPI(title="dragwarp", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Refine-Warning"],
    )
    store = SessionStore(config.session_ttl_seconds, config.history_bound)
    app.state.store = store
    app.state.config = config

    def bad_request(message: str) -> HTTPException:
        return HTTPException(status_code=400, detail=message)

    async def read_png_body(request: Request) -> bytes:
        body = await request.body()
        if not body:
            raise bad_request("request body must contain PNG bytes")
        return body

    @app.get("/v1/healthz")
    def healthz():
        return {"ok": True}

    @app.get("/v1/backends")
    def backends():
        return [
            {"name": d.name, "kind": d.kind}
            for d in sorted(registry.backends.values(), key=lambda d: d.name)
        ]

    @app.post("/v1/sessions")
    async def create_session(
        request: Request,
        resize_long_edge_param: int | None = Query(default=None, alias="resize_long_edge"),
    ):
        content_type = request.headers.get("content-type", "")
        resize = resize_long_edge_param
        if content_type.startswith("application/json"):
            doc = await request.json()
            if not isinstance(doc, dict) or "image" not in doc:
                raise bad_request('JSON body must carry an "image" field (base64 PNG)')
            from .pngio import from_b64

            try:
                png = from_b64(doc["image"])
            except InvalidInputError as exc:
                raise bad_request(str(exc))
            if resize is None and "resize_long_edge" in doc:
                resize = int(doc["resize_long_edge"])
        else:
            png = await read_png_body(request)
        if resize is None:
            resize = config.resize_long_edge
        if resize < 0:
            raise bad_request("resize_long_edge must be >= 0")
        try:
            image = decode_image_png(png)
            image = resize_long_edge(image, resize)
        except InvalidInputError as exc:
            raise bad_request(str(exc))
        session = store.create(image)
        return {"id": session.id, "width": image.shape[1], "height": image.shape[0]}

    @app.get("/v1/sessions/{session_id}/image")
    def get_image(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return Response(content=encode_image_png(session.base_image), media_type="image/png")

    @app.put("/v1/sessions/{session_id}/mask")
    async def set_mask(session_id: str, request: Request):
        session = store.get(session_id)
        png = await read_png_body(request)
        try:
            mask = decode_mask_png(png)
        except InvalidInputError as exc:
            raise bad_request(str(exc))
        with session.lock:
            if mask.shape != session.base_image.shape[:2]:
                raise bad_request(
                    f"mask is {mask.shape[1]}x{mask.shape[0]} but the session image "
                    f"is {session.base_image.shape[1]}x{session.base_image.shape[0]}"
                )
            session.mask = mask
            session.invalidate_preview()
        return {"ok": True, "warnings": []}

    @app.put("/v1/sessions/{session_id}/points")
    def set_points(session_id: str, body: dict = Body(...)):
        session = store.get(session_id)
        if "pairs" not in body or not isinstance(body["pairs"], list):
            raise bad_request('body must carry a "pairs" list')
        try:
            pairs = [
                ControlPair(
                    handle=(p["handle"][0], p["handle"][1]),
                    target=(p["target"][0], p["target"][1]),
                )
                for p in body["pairs"]
            ]
        except (TypeError, KeyError, IndexError, InvalidInputError) as exc:
            raise bad_request(f"malformed pair list: {exc}")
        with session.lock:
            h, w = session.base_image.shape[:2]
            problems = validate_pairs_in_bounds(pairs, w, h)
            if problems:
                # Atomic: the previous pair list stays untouched.
                raise bad_request("; ".join(problems))
            session.pairs = pairs
            session.invalidate_preview()
            rejected = _association_rejects(session)
        return {"ok": True, "rejected": rejected}

    def _association_rejects(session: Session) -> list[dict]:
        if not session.mask.any() or not session.pairs:
            return []
        from .contours import find_contours
        from .warp import associate_control_points

        h, w = session.base_image.shape[:2]
        _, rejected = associate_control_points(
            find_contours(session.mask), session.pairs, w, h
        )
        return [_pair_json(p) for p in rejected]

    @app.post("/v1/sessions/{session_id}/refine")
    def refine_endpoint(session_id: str, body: dict | None = Body(default=None)):
        session = store.get(session_id)
        r1 = None
        if body:
            r1 = body.get("r1")
        with session.lock:
            if not session.mask.any():
                raise bad_request("session has no mask to refine")
            cfg = session.refine_config
            if r1 is not None:
                try:
                    cfg = RefineConfig(r1=float(r1), point_cap=cfg.point_cap)
                except InvalidInputError as exc:
                    raise bad_request(str(exc))
            refined, warnings = refine(session.base_image, session.mask, segmenter, cfg)
            session.mask = refined
            session.invalidate_preview()
            png = encode_mask_png(refined)
        headers = {}
        if warnings:
            headers["X-Refine-Warning"] = "; ".join(warnings)
        return Response(content=png, media_type="image/png", headers=headers)

    def _compute_preview(session: Session) -> dict[str, Any]:
        t0 = time.perf_counter()
        out = render_warp(
            session.base_image, session.mask, session.pairs, session.warp_config
        )
        timing_ms = (time.perf_counter() - t0) * 1000.0
        payload = {
            "warped": to_b64(encode_image_png(out.warped)),
            "inpaint_mask": to_b64(encode_mask_png(out.inpaint_mask)),
            "rejected_pairs": [_pair_json(p) for p in out.rejected_pairs],
            "timing_ms": timing_ms,
        }
        session.last_preview = out
        session.preview_payload = payload
        return payload

    @app.get("/v1/sessions/{session_id}/preview")
    def preview(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if session.preview_payload is not None:
                return session.preview_payload
            return _compute_preview(session)

    @app.post("/v1/sessions/{session_id}/inpaint")
    def inpaint_endpoint(session_id: str, body: dict | None = Body(default=None)):
        session = store.get(session_id)
        backend = (body or {}).get("backend") or "harmonic"
        with session.lock:
            if session.last_preview is None:
                _compute_preview(session)
            preview_out = session.last_preview
            request_obj = InpaintRequest(preview_out.warped, preview_out.inpaint_mask)
            try:
                edited, used, fallback = run_backend(
                    request_obj, registry, backend, transport=backend_transport
                )
            except BackendNotFoundError as exc:
                raise HTTPException(status_code=404, detail=str(exc))
            session.pending_edit = edited
        return {
            "image": to_b64(encode_image_png(edited)),
            "backend_used": used,
            "fallback": fallback,
        }

    @app.post("/v1/sessions/{session_id}/commit")
    def commit(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if session.pending_edit is None:
                raise bad_request("nothing to commit; run inpaint first")
            session.history.append(session.base_image)
            session.base_image = session.pending_edit
            session.pending_edit = None
            session.mask = np.zeros(session.base_image.shape[:2], dtype=bool)
            session.pairs = []
            session.invalidate_preview()
            session.round += 1
            return {"ok": True, "round": session.round}

    return app


def _pair_json(pair: ControlPair) -> dict:
    return {"handle": list(pair.handle), "target": list(pair.target)}


def serve(config: ServiceConfig, static_dir: str | None = None) -> None:
    """Blocking uvicorn runner used by the CLI."""
    import uvicorn

    app = create_app(config)
    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    host, port = config.host_port()
    uvicorn.run(app, host=host, port=port, log_level="info")
