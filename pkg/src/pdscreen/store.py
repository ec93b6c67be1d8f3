"""Directory-backed session store.

Layout: ``<root>/<session_id>/`` holds ``manifest.json``, the uploaded
artifacts, and ``report.json`` once analysis has run. Every write goes
through a temp file plus atomic rename, so a manifest is parseable after
any completed operation even if the process dies mid-write. Writes to one
session are serialized by an in-process lock; reads are lock-free against
the last atomic snapshot.
"""
from __future__ import annotations

import json
import os
import threading
import uuid
from pathlib import Path

from .core import RiskReport, SessionManifest, SessionStatus, TaskKind, utcnow

ARTIFACT_FILENAMES = {
    TaskKind.SPEECH: "speech.wav",
    TaskKind.FACE_DISGUST: "face_disgust.ljsonl",
    TaskKind.FACE_SMILE: "face_smile.ljsonl",
    TaskKind.FACE_SURPRISE: "face_surprise.ljsonl",
    TaskKind.MOTOR_LEFT: "motor_left.ljsonl",
    TaskKind.MOTOR_RIGHT: "motor_right.ljsonl",
}


class StoreError(Exception):
    pass


class StoreUnavailable(StoreError):
    pass


class UnknownSession(StoreError):
    pass


def atomic_write_bytes(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}-{threading.get_ident()}")
    tmp.write_bytes(data)
    tmp.replace(path)


def report_json_bytes(report: RiskReport) -> bytes:
    """Canonical report encoding; byte-stable for identical reports."""
    return (
        json.dumps(report.as_dict(), indent=1, sort_keys=True, ensure_ascii=False)
        + "\n"
    ).encode("utf-8")


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def create_session(self, participant: str = "", region: str = "*") -> SessionManifest:
        session_id = uuid.uuid4().hex
        manifest = SessionManifest(
            session_id=session_id,
            created_at=utcnow(),
            participant=participant,
            region=region,
        )
        try:
            self.session_dir(session_id).mkdir(parents=True, exist_ok=False)
            self.write_manifest(manifest)
        except OSError as exc:
            raise StoreUnavailable(f"cannot write to store: {exc}") from exc
        return manifest

    def load_manifest(self, session_id: str) -> SessionManifest:
        path = self.session_dir(session_id) / "manifest.json"
        if not path.exists():
            raise UnknownSession(session_id)
        return SessionManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def write_manifest(self, manifest: SessionManifest) -> None:
        path = self.session_dir(manifest.session_id) / "manifest.json"
        data = (json.dumps(manifest.as_dict(), indent=1) + "\n").encode("utf-8")
        atomic_write_bytes(path, data)

    def store_artifact(self, session_id: str, task: TaskKind, data: bytes) -> SessionManifest:
        """Persist an uploaded artifact and update the manifest atomically.
        Re-uploading the same task replaces the previous artifact."""
        with self.lock(session_id):
            manifest = self.load_manifest(session_id)
            filename = ARTIFACT_FILENAMES[task]
            atomic_write_bytes(self.session_dir(session_id) / filename, data)
            manifest = manifest.with_artifact(task, filename)
            self.write_manifest(manifest)
        return manifest

    def read_artifact(self, session_id: str, task: TaskKind) -> bytes:
        manifest = self.load_manifest(session_id)
        try:
            filename = manifest.artifacts[task]
        except KeyError:
            raise UnknownSession(f"no {task.value} artifact in {session_id}") from None
        return (self.session_dir(session_id) / filename).read_bytes()

    def set_status(self, session_id: str, status: SessionStatus) -> SessionManifest:
        with self.lock(session_id):
            manifest = self.load_manifest(session_id).with_status(status)
            self.write_manifest(manifest)
        return manifest

    def write_report(self, session_id: str, report: RiskReport) -> bytes:
        data = report_json_bytes(report)
        atomic_write_bytes(self.session_dir(session_id) / "report.json", data)
        return data

    def read_report_bytes(self, session_id: str) -> bytes | None:
        path = self.session_dir(session_id) / "report.json"
        if not path.exists():
            return None
        return path.read_bytes()

    def session_ids(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(
            p.name for p in self.root.iterdir() if (p / "manifest.json").exists()
        )
