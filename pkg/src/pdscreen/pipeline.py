"""Per-session analysis orchestration: artifacts in, risk report out.

Modalities are isolated: a corrupt face track must not block the motor
score, so each modality runs in its own try block and failures land in
the manifest's error map instead of aborting the run. Analysis is
idempotent — once a report exists it is returned as stored — and
crash-safe: a run that dies leaves the manifest parseable with status
``analyzing`` and a re-run completes normally.
"""
from __future__ import annotations

import json
from dataclasses import replace
from datetime import datetime
from pathlib import Path

from .bundle import ModelBundle
from .core import (
    FACE_TASKS,
    Modality,
    ModalityScore,
    ResourceEntry,
    RiskReport,
    SessionManifest,
    SessionStatus,
    TaskKind,
)
from .face import extract_face_features
from .gbdt import predict_gbdt
from .ingest import TrackKind, gap_fill, parse_track, parse_wav
from .motor import aperture, extract_motor_features
from .screening import MOTOR_SCORE_MAX, build_report, score_modality
from .speech import extract_speech_features
from .store import SessionStore, UnknownSession
from .svm import predict_svm_ensemble


class NotReady(Exception):
    pass


class NotAnalyzed(Exception):
    pass


def _speech_score(store: SessionStore, manifest: SessionManifest, bundle: ModelBundle):
    if TaskKind.SPEECH not in manifest.artifacts or bundle.speech_model is None:
        return None
    clip = parse_wav(store.read_artifact(manifest.session_id, TaskKind.SPEECH))
    fv = extract_speech_features(clip)
    return score_modality(Modality.SPEECH, predict_gbdt(bundle.speech_model, fv))


def _face_score(store: SessionStore, manifest: SessionManifest, bundle: ModelBundle):
    present = [t for t in FACE_TASKS if t in manifest.artifacts]
    if not present or bundle.face_model is None:
        return None
    tracks = {}
    for task in present:
        text = store.read_artifact(manifest.session_id, task).decode("utf-8")
        tracks[task] = gap_fill(parse_track(text, TrackKind.FACE))
    fv = extract_face_features(tracks)
    return score_modality(Modality.FACE, predict_svm_ensemble(bundle.face_model, fv))


def _motor_score(store: SessionStore, manifest: SessionManifest, bundle: ModelBundle):
    present = [
        t
        for t in (TaskKind.MOTOR_LEFT, TaskKind.MOTOR_RIGHT)
        if t in manifest.artifacts
    ]
    if not present or bundle.motor_model is None:
        return None
    # per-hand severities; screening keeps the worse hand (PD is asymmetric)
    severities = []
    for task in present:
        text = store.read_artifact(manifest.session_id, task).decode("utf-8")
        track = gap_fill(parse_track(text, TrackKind.HAND))
        fv = extract_motor_features(aperture(track))
        raw = predict_gbdt(bundle.motor_model, fv)
        severities.append(min(max(raw, 0.0), MOTOR_SCORE_MAX))
    return score_modality(Modality.MOTOR, max(severities))


_MODALITY_RUNNERS = (
    (Modality.SPEECH, _speech_score),
    (Modality.FACE, _face_score),
    (Modality.MOTOR, _motor_score),
)


def analyze_session(
    store: SessionStore,
    session_id: str,
    bundle: ModelBundle,
    directory: list[ResourceEntry],
    now: datetime | None = None,
) -> bytes:
    """Run the full pipeline for one session; returns the canonical report
    bytes (the same bytes persisted as ``report.json``)."""
    with store.lock(session_id):
        stored = store.read_report_bytes(session_id)
        if stored is not None:
            return stored

        manifest = store.load_manifest(session_id)
        if not manifest.artifacts:
            raise NotReady(f"session {session_id} has no artifacts")
        if manifest.status not in (SessionStatus.COLLECTING, SessionStatus.ANALYZING):
            raise NotReady(f"session {session_id} is {manifest.status.value}")

        manifest = manifest.with_status(SessionStatus.ANALYZING)
        store.write_manifest(manifest)

        scores: list[ModalityScore] = []
        errors: dict[str, str] = {}
        for modality, runner in _MODALITY_RUNNERS:
            try:
                score = runner(store, manifest, bundle)
            except Exception as exc:  # modality isolation by design
                errors[modality.value] = f"{type(exc).__name__}: {exc}"
                continue
            if score is not None:
                scores.append(score)

        report = build_report(
            session_id=session_id,
            scores=scores,
            directory=directory,
            region_code=manifest.region,
            now=now,
            weights=bundle.aggregator(),
        )
        data = store.write_report(session_id, report)
        final = SessionStatus.COMPLETE if scores else SessionStatus.FAILED
        store.write_manifest(replace(manifest, status=final, errors=errors))
        return data


def get_report_bytes(store: SessionStore, session_id: str) -> bytes:
    if not (store.session_dir(session_id) / "manifest.json").exists():
        raise UnknownSession(session_id)
    data = store.read_report_bytes(session_id)
    if data is None:
        raise NotAnalyzed(session_id)
    return data


def analyze_directory(
    session_dir: str | Path,
    bundle: ModelBundle,
    directory: list[ResourceEntry],
    now: datetime | None = None,
) -> bytes:
    """CLI entry: treat one session directory as a single-session store."""
    session_dir = Path(session_dir)
    if not (session_dir / "manifest.json").exists():
        raise UnknownSession(f"no manifest.json in {session_dir}")
    store = SessionStore(session_dir.parent)
    manifest = SessionManifest.from_dict(
        json.loads((session_dir / "manifest.json").read_text(encoding="utf-8"))
    )
    if manifest.session_id != session_dir.name:
        # keep the on-disk layout authoritative
        manifest = SessionManifest.from_dict(
            {**manifest.as_dict(), "session_id": session_dir.name}
        )
        store.write_manifest(manifest)
    return analyze_session(store, session_dir.name, bundle, directory, now=now)
