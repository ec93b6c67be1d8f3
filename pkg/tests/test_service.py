import json
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient

from pdscreen.bundle import ModelBundle
from pdscreen.cohort import (
    sample_voice_profile,
    synth_face_track,
    synth_hand_track,
    sample_tap_profile,
    synth_voice_clip,
    write_session_fixture,
)
from pdscreen.core import RiskReport, SessionStatus, TaskKind
from pdscreen.ingest import track_to_ljsonl, write_wav
from pdscreen.pipeline import NotReady, analyze_directory, analyze_session
from pdscreen.screening import load_resource_directory
from pdscreen.service import ServiceConfig, create_app
from pdscreen.store import SessionStore, StoreUnavailable


@pytest.fixture()
def store(tmp_path):
    return SessionStore(tmp_path / "store")


@pytest.fixture()
def client(tmp_path, small_bundle):
    cfg = ServiceConfig(store_root=str(tmp_path / "store"), max_upload_bytes=8_000_000)
    app = create_app(cfg, bundle=small_bundle)
    return TestClient(app)


def make_speech_wav(seed=3, affected=False):
    rng = np.random.default_rng(seed)
    return write_wav(synth_voice_clip(rng, sample_voice_profile(rng, affected)))


def make_hand_ljsonl(seed=4, severity=1.0):
    rng = np.random.default_rng(seed)
    return track_to_ljsonl(synth_hand_track(rng, sample_tap_profile(rng, severity))).encode()


def make_face_ljsonl(seed=5, task=TaskKind.FACE_SMILE):
    from pdscreen.cohort import sample_face_profile

    rng = np.random.default_rng(seed)
    return track_to_ljsonl(
        synth_face_track(rng, task, sample_face_profile(rng, False))
    ).encode()


class TestSessionStore:
    def test_create_unique_ids(self, store):
        a = store.create_session()
        b = store.create_session()
        assert a.session_id != b.session_id

    def test_created_manifest_empty_artifacts(self, store):
        m = store.create_session()
        loaded = store.load_manifest(m.session_id)
        assert loaded.artifacts == {}
        assert loaded.status == SessionStatus.COLLECTING

    def test_artifact_round_trip_and_replace(self, store):
        m = store.create_session()
        store.store_artifact(m.session_id, TaskKind.SPEECH, b"one")
        store.store_artifact(m.session_id, TaskKind.SPEECH, b"two")
        assert store.read_artifact(m.session_id, TaskKind.SPEECH) == b"two"
        manifest = store.load_manifest(m.session_id)
        assert list(manifest.artifacts) == [TaskKind.SPEECH]

    def test_manifest_always_parseable_under_concurrent_writers(self, store):
        """Parallel writers to different sessions never corrupt manifests."""
        ids = [store.create_session().session_id for _ in range(8)]
        payload = b"x" * 5000

        def hammer(session_id):
            for i in range(15):
                task = list(TaskKind)[i % 6]
                store.store_artifact(session_id, task, payload + str(i).encode())
                store.load_manifest(session_id)

        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(hammer, ids))

        for session_id in ids:
            manifest = store.load_manifest(session_id)
            assert len(manifest.artifacts) == 6
            for task in TaskKind:
                data = store.read_artifact(session_id, task)
                assert data.startswith(payload)

    def test_unwritable_store_raises_store_unavailable(self, store, monkeypatch):
        # chmod can't model this when tests run as root; inject the OS error
        from pathlib import Path

        def deny(self, *args, **kwargs):
            raise PermissionError(13, "read-only store", str(self))

        monkeypatch.setattr(Path, "mkdir", deny)
        with pytest.raises(StoreUnavailable):
            store.create_session()

    def test_concurrent_writes_same_session_serialized(self, store):
        session_id = store.create_session().session_id

        def write(i):
            store.store_artifact(
                session_id, TaskKind.SPEECH, b"payload-%d" % i
            )

        with ThreadPoolExecutor(max_workers=6) as pool:
            list(pool.map(write, range(30)))
        data = store.read_artifact(session_id, TaskKind.SPEECH)
        assert data.startswith(b"payload-")
        store.load_manifest(session_id)  # parseable


class TestPipeline:
    def test_golden_session_directory(self, tmp_path, small_bundle, resource_directory):
        sess = tmp_path / "gold"
        write_session_fixture(sess, seed=42)
        data = analyze_directory(sess, small_bundle, resource_directory)
        report = json.loads(data)
        assert {s["modality"] for s in report["modality_scores"]} == {
            "speech",
            "face",
            "motor",
        }
        assert 0.0 <= report["overall_likelihood"] <= 1.0
        assert len(report["resources"]) >= 1
        assert "not intended for clinical use" in report["disclaimer"]

    def test_idempotent(self, tmp_path, small_bundle, resource_directory):
        sess = tmp_path / "gold2"
        write_session_fixture(sess, seed=43)
        first = analyze_directory(sess, small_bundle, resource_directory)
        second = analyze_directory(sess, small_bundle, resource_directory)
        assert first == second

    def test_modality_isolation_on_corrupt_artifact(
        self, tmp_path, small_bundle, resource_directory
    ):
        sess = tmp_path / "gold3"
        write_session_fixture(sess, seed=44)
        # corrupt the face tracks after manifest creation
        for task in ("face_disgust", "face_smile", "face_surprise"):
            (sess / f"{task}.ljsonl").write_text("garbage\n")
        data = analyze_directory(sess, small_bundle, resource_directory)
        report = json.loads(data)
        mods = {s["modality"] for s in report["modality_scores"]}
        assert mods == {"speech", "motor"}
        assert "face" in report["not_assessed"]
        manifest = json.loads((sess / "manifest.json").read_text())
        assert manifest["status"] == "complete"
        assert "face" in manifest["errors"]

    def test_all_artifacts_corrupt_fails_with_report(
        self, tmp_path, small_bundle, resource_directory
    ):
        sess = tmp_path / "gold4"
        write_session_fixture(sess, seed=45, tasks=(TaskKind.SPEECH,))
        (sess / "speech.wav").write_bytes(b"RIFFxxxxWAVE")
        data = analyze_directory(sess, small_bundle, resource_directory)
        report = json.loads(data)
        assert "overall_likelihood" not in report
        assert report["disclaimer"]
        manifest = json.loads((sess / "manifest.json").read_text())
        assert manifest["status"] == "failed"

    def test_not_ready_when_no_artifacts(self, store, small_bundle, resource_directory):
        m = store.create_session()
        with pytest.raises(NotReady):
            analyze_session(store, m.session_id, small_bundle, resource_directory)

    def test_crash_mid_analysis_recovers(self, tmp_path, small_bundle, resource_directory, monkeypatch):
        sess = tmp_path / "gold5"
        write_session_fixture(sess, seed=46, tasks=(TaskKind.SPEECH,))
        store = SessionStore(tmp_path)

        import pdscreen.pipeline as pl

        def boom(*args, **kwargs):
            raise KeyboardInterrupt  # not caught by modality isolation

        monkeypatch.setattr(pl, "build_report", boom)
        with pytest.raises(KeyboardInterrupt):
            analyze_session(store, "gold5", small_bundle, resource_directory)

        manifest = store.load_manifest("gold5")
        assert manifest.status == SessionStatus.ANALYZING  # parseable, mid-flight

        monkeypatch.undo()
        data = analyze_session(store, "gold5", small_bundle, resource_directory)
        assert json.loads(data)["modality_scores"]
        assert store.load_manifest("gold5").status == SessionStatus.COMPLETE


class TestHttpApi:
    def test_healthz(self, client):
        assert client.get("/healthz").status_code == 200

    def test_create_session_distinct_ids(self, client):
        a = client.post("/api/v1/sessions")
        b = client.post("/api/v1/sessions")
        assert a.status_code == b.status_code == 201
        assert a.json()["session_id"] != b.json()["session_id"]

    def test_upload_valid_wav(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        r = client.put(f"/api/v1/sessions/{sid}/tasks/speech", content=make_speech_wav())
        assert r.status_code == 204

    def test_upload_unknown_session(self, client):
        r = client.put("/api/v1/sessions/nope/tasks/speech", content=make_speech_wav())
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "unknown_session"

    def test_upload_invalid_task(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        r = client.put(f"/api/v1/sessions/{sid}/tasks/dance", content=b"x")
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "invalid_task"

    def test_upload_wrong_format_422(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        # a face track (468 points) uploaded as a hand task
        r = client.put(
            f"/api/v1/sessions/{sid}/tasks/motor_left", content=make_face_ljsonl()
        )
        assert r.status_code == 422
        assert r.json()["error"]["code"] == "validation_failed"

    def test_upload_too_large(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        r = client.put(
            f"/api/v1/sessions/{sid}/tasks/speech", content=b"\x00" * 9_000_000
        )
        assert r.status_code == 413

    def test_full_flow_speech_only(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        client.put(f"/api/v1/sessions/{sid}/tasks/speech", content=make_speech_wav())

        r = client.post(f"/api/v1/sessions/{sid}/analyze")
        assert r.status_code == 200
        report = r.json()
        assert [s["modality"] for s in report["modality_scores"]] == ["speech"]
        # single modality: likelihood equals that modality's probability
        assert report["overall_likelihood"] == report["modality_scores"][0]["raw_score"]
        assert set(report["not_assessed"]) == {"face", "motor"}

        again = client.post(f"/api/v1/sessions/{sid}/analyze")
        assert again.content == r.content

        stored = client.get(f"/api/v1/sessions/{sid}/report")
        assert stored.content == r.content

    def test_create_session_store_unavailable_503(self, client, monkeypatch):
        monkeypatch.setattr(
            SessionStore,
            "create_session",
            lambda self, **kw: (_ for _ in ()).throw(StoreUnavailable("disk is read-only")),
        )
        r = client.post("/api/v1/sessions")
        assert r.status_code == 503
        assert r.json()["error"]["code"] == "store_unavailable"

    def test_analyze_not_ready(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        r = client.post(f"/api/v1/sessions/{sid}/analyze")
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "not_ready"

    def test_analyze_unknown_session(self, client):
        r = client.post("/api/v1/sessions/nope/analyze")
        assert r.status_code == 404

    def test_report_before_analyze(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        r = client.get(f"/api/v1/sessions/{sid}/report")
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "not_analyzed"

    def test_report_unknown_session(self, client):
        r = client.get("/api/v1/sessions/nope/report")
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "unknown_session"

    def test_upload_after_analyze_conflicts(self, client):
        sid = client.post("/api/v1/sessions").json()["session_id"]
        client.put(f"/api/v1/sessions/{sid}/tasks/speech", content=make_speech_wav())
        client.post(f"/api/v1/sessions/{sid}/analyze")
        r = client.put(f"/api/v1/sessions/{sid}/tasks/speech", content=make_speech_wav())
        assert r.status_code == 409

    def test_full_six_task_session(self, client):
        sid = client.post(
            "/api/v1/sessions", json={"participant": "p", "region": "US-NY"}
        ).json()["session_id"]
        client.put(f"/api/v1/sessions/{sid}/tasks/speech", content=make_speech_wav())
        for i, task in enumerate(
            (TaskKind.FACE_DISGUST, TaskKind.FACE_SMILE, TaskKind.FACE_SURPRISE)
        ):
            client.put(
                f"/api/v1/sessions/{sid}/tasks/{task.value}",
                content=make_face_ljsonl(seed=10 + i, task=task),
            )
        for i, task in enumerate((TaskKind.MOTOR_LEFT, TaskKind.MOTOR_RIGHT)):
            client.put(
                f"/api/v1/sessions/{sid}/tasks/{task.value}",
                content=make_hand_ljsonl(seed=20 + i),
            )
        r = client.post(f"/api/v1/sessions/{sid}/analyze")
        assert r.status_code == 200
        report = r.json()
        assert len(report["modality_scores"]) == 3
        assert report["not_assessed"] == []
        assert len(report["resources"]) >= 1
        # any 2xx body must decode as a valid report
        decoded = RiskReport.from_dict(report)
        assert decoded.disclaimer
        assert decoded.overall_likelihood is not None


class TestServiceConfig:
    def test_env_overrides_file(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"port": 1111, "store_root": "/from/file"}))
        cfg = ServiceConfig.load(
            cfg_file,
            env={"PDSCREEN_PORT": "2222", "PDSCREEN_CORS_ORIGINS": "http://a,http://b"},
        )
        assert cfg.port == 2222  # env wins
        assert cfg.store_root == "/from/file"  # file beats default
        assert cfg.cors_origins == ["http://a", "http://b"]

    def test_defaults(self):
        cfg = ServiceConfig.load(env={})
        assert cfg.port == 8710
        assert cfg.max_upload_bytes > 0

    def test_invalid_max_upload(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"max_upload_bytes": 0}))
        with pytest.raises(ValueError):
            ServiceConfig.load(cfg_file, env={})
