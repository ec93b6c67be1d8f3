"""HTTP API for session collection, upload, analysis, and reports.

Endpoints (v1):

* ``POST /api/v1/sessions`` — create a session, returns ``{"session_id"}``
* ``PUT  /api/v1/sessions/{id}/tasks/{task}`` — upload one task artifact
* ``POST /api/v1/sessions/{id}/analyze`` — run the pipeline, returns the report
* ``GET  /api/v1/sessions/{id}/report`` — fetch the stored report
* ``GET  /healthz`` — liveness probe

Errors are JSON ``{"error": {"code", "detail"}}``. Configuration comes
from defaults, overridden by a JSON config file, overridden by
``PDSCREEN_*`` environment variables (env > file > defaults).
"""
from __future__ import annotations

import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import ingest
from .bundle import ModelBundle, load_bundle
from .core import ResourceEntry, SessionStatus, TaskKind, FACE_TASKS
from .pipeline import NotAnalyzed, NotReady, analyze_session, get_report_bytes
from .screening import load_resource_directory
from .store import SessionStore, StoreUnavailable, UnknownSession

access_log = logging.getLogger("pdscreen.access")

DEFAULT_MAX_UPLOAD_BYTES = 32 * 1024 * 1024


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8710
    store_root: str = "./sessions"
    bundle_path: str = ""
    resources_path: str = ""  # empty = packaged directory
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES
    request_timeout_s: float = 60.0
    cors_origins: list[str] = field(default_factory=list)

    ENV_PREFIX = "PDSCREEN_"

    @classmethod
    def load(cls, config_path: str | Path | None = None, env: dict | None = None) -> "ServiceConfig":
        """Defaults, then JSON file values, then PDSCREEN_* env overrides."""
        cfg = cls()
        if config_path:
            raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
            for f in fields(cls):
                if f.name in raw:
                    setattr(cfg, f.name, raw[f.name])
        env = os.environ if env is None else env
        for f in fields(cls):
            key = cls.ENV_PREFIX + f.name.upper()
            if key not in env:
                continue
            value = env[key]
            if f.name == "cors_origins":
                cfg.cors_origins = [v for v in value.split(",") if v]
            elif f.type in ("int", int):
                setattr(cfg, f.name, int(value))
            elif f.type in ("float", float):
                setattr(cfg, f.name, float(value))
            else:
                setattr(cfg, f.name, value)
        if cfg.max_upload_bytes <= 0:
            raise ValueError("max_upload_bytes must be positive")
        return cfg


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "detail": detail}}
    )


def create_app(
    config: ServiceConfig,
    bundle: ModelBundle | None = None,
    directory: list[ResourceEntry] | None = None,
) -> FastAPI:
    """Build the ASGI app; the model bundle and resource directory are
    loaded once and shared read-only across requests."""
    if bundle is None:
        if not config.bundle_path:
            raise ValueError("config.bundle_path is required")
        bundle = load_bundle(config.bundle_path)
    if directory is None:
        directory = load_resource_directory(config.resources_path or None)
    store = SessionStore(config.store_root)
    Path(config.store_root).mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="pdscreen", docs_url=None, redoc_url=None)
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.middleware("http")
    async def request_logger(request: Request, call_next):
        start = time.monotonic()
        response = await call_next(request)
        access_log.info(
            json.dumps(
                {
                    "method": request.method,
                    "path": request.url.path,
                    "status": response.status_code,
                    "duration_ms": round((time.monotonic() - start) * 1000, 2),
                }
            )
        )
        return response

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/api/v1/sessions", status_code=201)
    async def create_session(request: Request):
        participant, region = "", "*"
        body = await request.body()
        if body:
            try:
                payload = json.loads(body)
                participant = str(payload.get("participant", ""))
                region = str(payload.get("region", "*")) or "*"
            except (json.JSONDecodeError, AttributeError):
                return _error(400, "bad_request", "body must be a JSON object")
        try:
            manifest = store.create_session(participant=participant, region=region)
        except StoreUnavailable as exc:
            return _error(503, "store_unavailable", str(exc))
        return {"session_id": manifest.session_id}

    @app.put("/api/v1/sessions/{session_id}/tasks/{task}", status_code=204)
    async def upload_artifact(session_id: str, task: str, request: Request):
        try:
            kind = TaskKind(task)
        except ValueError:
            return _error(400, "invalid_task", f"unknown task {task!r}")
        declared = request.headers.get("content-length")
        if declared and declared.isdigit() and int(declared) > config.max_upload_bytes:
            return _error(413, "too_large", "upload exceeds the configured limit")
        body = await request.body()
        if len(body) > config.max_upload_bytes:
            return _error(413, "too_large", "upload exceeds the configured limit")

        try:
            manifest = store.load_manifest(session_id)
        except UnknownSession:
            return _error(404, "unknown_session", session_id)
        if manifest.status != SessionStatus.COLLECTING:
            return _error(
                409, "not_collecting", f"session is {manifest.status.value}"
            )

        try:
            _validate_artifact(kind, body)
        except (ingest.IngestError, UnicodeDecodeError) as exc:
            return _error(422, "validation_failed", f"{type(exc).__name__}: {exc}")

        store.store_artifact(session_id, kind, body)
        return Response(status_code=204)

    @app.post("/api/v1/sessions/{session_id}/analyze")
    async def analyze(session_id: str):
        try:
            store.load_manifest(session_id)
        except UnknownSession:
            return _error(404, "unknown_session", session_id)
        try:
            data = analyze_session(store, session_id, bundle, directory)
        except NotReady as exc:
            return _error(409, "not_ready", str(exc))
        return Response(content=data, media_type="application/json")

    @app.get("/api/v1/sessions/{session_id}/report")
    async def report(session_id: str):
        try:
            data = get_report_bytes(store, session_id)
        except UnknownSession:
            return _error(404, "unknown_session", session_id)
        except NotAnalyzed:
            return _error(404, "not_analyzed", f"session {session_id} not analyzed yet")
        return Response(content=data, media_type="application/json")

    return app


def _validate_artifact(kind: TaskKind, body: bytes) -> None:
    """Parse uploads eagerly so bad files fail at upload time, not analyze time."""
    if kind == TaskKind.SPEECH:
        ingest.parse_wav(body)
        return
    text = body.decode("utf-8", errors="strict") if body else ""
    track_kind = ingest.TrackKind.FACE if kind in FACE_TASKS else ingest.TrackKind.HAND
    ingest.parse_track(text, track_kind)


def serve(config: ServiceConfig, bundle: ModelBundle | None = None) -> None:
    """Run the API under uvicorn (blocking)."""
    import uvicorn

    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    app = create_app(config, bundle=bundle)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
