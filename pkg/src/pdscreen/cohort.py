"""Synthetic screening cohorts with planted, clinically motivated effects.

Clinical recordings cannot ship with the code, so validation runs on
synthetic subjects instead: affected voices get raised jitter and shimmer,
affected faces get a reduced action-unit range (hypomimia), and affected
hands tap slower, smaller, and with amplitude decrement and hesitations.
Every artifact is synthesized at the raw-input level (PCM audio, landmark
tracks) and pushed through the real extractors, so a cohort exercises the
entire pipeline, not just the learners.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .core import FACE_TASKS, SessionManifest, SessionStatus, TaskKind
from .dataset import Dataset, TaskType
from .face import extract_face_features
from .ingest import (
    FACE_POINT_COUNT,
    AudioClip,
    LandmarkFrame,
    LandmarkTrack,
    TrackKind,
    write_wav,
    track_to_ljsonl,
)
from .motor import extract_motor_features, aperture
from .speech import extract_speech_features

SPEECH_RATE_HZ = 8000
TRACK_FPS = 30.0


# --- voice ------------------------------------------------------------------

@dataclass(frozen=True)
class VoiceProfile:
    f0_hz: float
    jitter_sigma: float      # per-cycle period perturbation, fraction
    shimmer_sigma: float     # per-cycle amplitude perturbation, fraction
    duration_s: float = 2.5
    noise_level: float = 0.005


def synth_voice_clip(
    rng: np.random.Generator, profile: VoiceProfile, rate: int = SPEECH_RATE_HZ
) -> AudioClip:
    """A sustained vowel-like tone built cycle by cycle.

    Each glottal cycle gets its own period and amplitude multiplier, which
    is exactly what jitter and shimmer measure.
    """
    n_total = int(profile.duration_s * rate)
    samples = np.zeros(n_total)
    pos = 0.0
    while pos < n_total:
        period_s = (1.0 + rng.normal(0.0, profile.jitter_sigma)) / profile.f0_hz
        period_n = period_s * rate
        amp = 0.6 * (1.0 + rng.normal(0.0, profile.shimmer_sigma))
        start = int(np.ceil(pos))
        end = min(int(np.ceil(pos + period_n)), n_total)
        if end <= start:
            break
        phase = (np.arange(start, end) - pos) / period_n
        samples[start:end] = amp * np.sin(2 * np.pi * phase)
        pos += period_n
    samples += rng.normal(0.0, profile.noise_level, n_total)
    return AudioClip(samples=np.clip(samples, -1.0, 1.0), sample_rate_hz=rate)


def sample_voice_profile(rng: np.random.Generator, affected: bool) -> VoiceProfile:
    if affected:
        return VoiceProfile(
            f0_hz=float(rng.uniform(95.0, 230.0)),
            jitter_sigma=float(rng.uniform(0.012, 0.030)),
            shimmer_sigma=float(rng.uniform(0.06, 0.14)),
        )
    return VoiceProfile(
        f0_hz=float(rng.uniform(95.0, 230.0)),
        jitter_sigma=float(rng.uniform(0.001, 0.006)),
        shimmer_sigma=float(rng.uniform(0.01, 0.04)),
    )


# --- face -------------------------------------------------------------------

# primary AUs recruited by each mimicry task
_TASK_AUS = {
    TaskKind.FACE_DISGUST: ("AU09", "AU04"),
    TaskKind.FACE_SMILE: ("AU12", "AU06"),
    TaskKind.FACE_SURPRISE: ("AU01", "AU02", "AU26"),
}
_ALL_AUS = ("AU01", "AU02", "AU04", "AU06", "AU09", "AU12", "AU25", "AU26")

# rough canonical positions for the handful of FaceMesh points the
# extractor reads; the remaining points are static filler
_FACE_ANCHORS = {
    33: (-0.30, 0.00, 0.0),
    263: (0.30, 0.00, 0.0),
    61: (-0.15, -0.35, 0.0),
    291: (0.15, -0.35, 0.0),
    70: (-0.25, 0.25, 0.0),
    300: (0.25, 0.25, 0.0),
    105: (-0.15, 0.28, 0.0),
    334: (0.15, 0.28, 0.0),
    13: (0.0, -0.33, 0.0),
    14: (0.0, -0.37, 0.0),
}


@dataclass(frozen=True)
class FaceProfile:
    expressivity: float      # scales both AU range and landmark motion
    duration_s: float = 4.0


def _activation_curve(n_frames: int) -> np.ndarray:
    """Neutral, ramp up, hold: the shape of a cued expression mimic."""
    ramp_start = int(0.2 * n_frames)
    ramp_end = int(0.6 * n_frames)
    curve = np.zeros(n_frames)
    curve[ramp_start:ramp_end] = np.linspace(0.0, 1.0, ramp_end - ramp_start)
    curve[ramp_end:] = 1.0
    return curve


def synth_face_track(
    rng: np.random.Generator,
    task: TaskKind,
    profile: FaceProfile,
    fps: float = TRACK_FPS,
) -> LandmarkTrack:
    n_frames = int(profile.duration_s * fps)
    base = rng.normal(0.0, 0.02, (FACE_POINT_COUNT, 3))
    base[:, 2] = 0.0
    for idx, anchor in _FACE_ANCHORS.items():
        base[idx] = anchor
    scale = rng.uniform(0.8, 1.6)  # camera distance; extractor normalizes it out

    curve = _activation_curve(n_frames)
    peak = 2.5 * profile.expressivity
    frames = []
    for i in range(n_frames):
        act = curve[i]
        pts = base.copy()
        motion = 0.12 * profile.expressivity * act
        if task == TaskKind.FACE_SMILE:
            pts[61] += (-motion, 0.5 * motion, 0.0)
            pts[291] += (motion, 0.5 * motion, 0.0)
        elif task == TaskKind.FACE_DISGUST:
            pts[105] += (0.0, -0.6 * motion, 0.0)
            pts[334] += (0.0, -0.6 * motion, 0.0)
            pts[13] += (0.0, 0.4 * motion, 0.0)
        else:  # surprise
            pts[70] += (0.0, motion, 0.0)
            pts[300] += (0.0, motion, 0.0)
            pts[105] += (0.0, motion, 0.0)
            pts[334] += (0.0, motion, 0.0)
            pts[14] += (0.0, -0.8 * motion, 0.0)
        pts += rng.normal(0.0, 0.0015, pts.shape)

        aus = {}
        for au in _ALL_AUS:
            if au in _TASK_AUS[task]:
                value = peak * act + abs(rng.normal(0.0, 0.08))
            else:
                value = abs(rng.normal(0.0, 0.05))
            aus[au] = float(value)
        frames.append(LandmarkFrame(t=i / fps, points=pts * scale, aus=aus))
    return LandmarkTrack(kind=TrackKind.FACE, frames=tuple(frames), nominal_fps=fps)


def sample_face_profile(rng: np.random.Generator, affected: bool) -> FaceProfile:
    if affected:
        return FaceProfile(expressivity=float(rng.uniform(0.15, 0.55)))
    return FaceProfile(expressivity=float(rng.uniform(0.80, 1.30)))


# --- motor ------------------------------------------------------------------

@dataclass(frozen=True)
class TapProfile:
    tap_hz: float
    amp_scale: float         # peak-to-valley aperture, normalized units
    decrement_frac: float    # fraction of amplitude lost over the run
    n_hesitations: int
    duration_s: float = 10.0


def synth_hand_track(
    rng: np.random.Generator, profile: TapProfile, fps: float = TRACK_FPS
) -> LandmarkTrack:
    """A tapping hand: thumb and index tips separate and close rhythmically."""
    n_frames = int(profile.duration_s * fps)
    t = np.arange(n_frames) / fps

    # frozen stretches model hesitations: the phase clock stops advancing
    phase_rate = np.full(n_frames, profile.tap_hz)
    for _ in range(profile.n_hesitations):
        start = rng.uniform(0.15, 0.75) * profile.duration_s
        length = rng.uniform(0.4, 0.9)
        phase_rate[(t >= start) & (t < start + length)] = 0.0
    phase = np.cumsum(phase_rate) / fps

    envelope = 1.0 - profile.decrement_frac * (t / profile.duration_s)
    amp = profile.amp_scale * envelope
    open_frac = 0.5 * (1.0 - np.cos(2 * np.pi * phase))  # 0 = closed, 1 = open
    ap = 0.12 + amp * open_frac + rng.normal(0.0, 0.004, n_frames)
    ap = np.maximum(ap, 0.01)

    scale = rng.uniform(0.7, 1.8)
    base = rng.normal(0.0, 0.02, (21, 3))
    base[0] = (0.0, 0.0, 0.0)     # wrist
    base[9] = (0.0, 0.55, 0.0)    # middle MCP: hand size 0.55
    base[4] = (-0.25, 0.45, 0.0)  # thumb tip rest position
    hand_size = 0.55

    frames = []
    direction = np.array([0.9, 0.35, 0.2])
    direction /= np.linalg.norm(direction)
    for i in range(n_frames):
        pts = base.copy()
        pts[8] = pts[4] + direction * ap[i] * hand_size
        pts += rng.normal(0.0, 0.001, pts.shape)
        # re-pin the normalization chain so aperture noise stays additive
        pts[0] = base[0]
        pts[9] = base[9]
        frames.append(LandmarkFrame(t=float(t[i]), points=pts * scale, aus=None))
    return LandmarkTrack(kind=TrackKind.HAND, frames=tuple(frames), nominal_fps=fps)


def sample_tap_profile(rng: np.random.Generator, severity: float) -> TapProfile:
    """Plant the bradykinesia signature for a 0-4 severity rating."""
    tap_hz = max(0.8, 3.8 - 0.55 * severity + rng.normal(0.0, 0.15))
    amp_scale = max(0.15, 0.85 - 0.14 * severity + rng.normal(0.0, 0.03))
    decrement = min(0.8, max(0.0, 0.12 * severity + rng.normal(0.0, 0.03)))
    hesitations = int(rng.poisson(0.6 * max(0.0, severity - 1.0)))
    return TapProfile(
        tap_hz=float(tap_hz),
        amp_scale=float(amp_scale),
        decrement_frac=float(decrement),
        n_hesitations=hesitations,
    )


# --- cohorts ----------------------------------------------------------------

def build_speech_cohort(n: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for _ in range(n):
        affected = bool(rng.integers(0, 2))
        clip = synth_voice_clip(rng, sample_voice_profile(rng, affected))
        fv = extract_speech_features(clip)
        rows.append(fv.values)
        labels.append(1.0 if affected else 0.0)
        schema = fv
    return Dataset(
        schema_id=schema.schema_id,
        feature_names=schema.names,
        x=np.array(rows),
        y=np.array(labels),
        task=TaskType.BINARY_CLASS,
    )


def build_face_cohort(n: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for _ in range(n):
        affected = bool(rng.integers(0, 2))
        profile = sample_face_profile(rng, affected)
        tracks = {task: synth_face_track(rng, task, profile) for task in FACE_TASKS}
        fv = extract_face_features(tracks)
        rows.append(fv.values)
        labels.append(1.0 if affected else 0.0)
        schema = fv
    return Dataset(
        schema_id=schema.schema_id,
        feature_names=schema.names,
        x=np.array(rows),
        y=np.array(labels),
        task=TaskType.BINARY_CLASS,
    )


def build_motor_cohort(n: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for _ in range(n):
        severity = float(rng.integers(0, 5))
        track = synth_hand_track(rng, sample_tap_profile(rng, severity))
        fv = extract_motor_features(aperture(track))
        rows.append(fv.values)
        labels.append(severity)
        schema = fv
    return Dataset(
        schema_id=schema.schema_id,
        feature_names=schema.names,
        x=np.array(rows),
        y=np.array(labels),
        task=TaskType.REGRESSION,
    )


def split_dataset(data: Dataset, train_frac: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled train/test split."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(data.x))
    cut = int(train_frac * len(order))
    make = lambda idx: Dataset(
        schema_id=data.schema_id,
        feature_names=data.feature_names,
        x=data.x[idx],
        y=data.y[idx],
        task=data.task,
    )
    return make(order[:cut]), make(order[cut:])


# --- golden session ---------------------------------------------------------

def write_session_fixture(
    directory: str | Path,
    seed: int = 20240101,
    affected: bool = True,
    participant: str = "fixture",
    tasks: tuple[TaskKind, ...] = tuple(TaskKind),
) -> SessionManifest:
    """Write a complete on-disk session (WAV + tracks + manifest).

    Deterministic for a given seed: two calls produce byte-identical
    artifacts, which makes the fixture usable as a golden input.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    artifacts: dict[TaskKind, str] = {}
    if TaskKind.SPEECH in tasks:
        clip = synth_voice_clip(rng, sample_voice_profile(rng, affected))
        (directory / "speech.wav").write_bytes(write_wav(clip))
        artifacts[TaskKind.SPEECH] = "speech.wav"

    face_profile = sample_face_profile(rng, affected)
    for task in FACE_TASKS:
        if task not in tasks:
            continue
        track = synth_face_track(rng, task, face_profile)
        name = f"{task.value}.ljsonl"
        (directory / name).write_text(track_to_ljsonl(track), encoding="utf-8")
        artifacts[task] = name

    severity = 2.5 if affected else 0.0
    for task in (TaskKind.MOTOR_LEFT, TaskKind.MOTOR_RIGHT):
        if task not in tasks:
            continue
        track = synth_hand_track(rng, sample_tap_profile(rng, severity))
        name = f"{task.value}.ljsonl"
        (directory / name).write_text(track_to_ljsonl(track), encoding="utf-8")
        artifacts[task] = name

    manifest = SessionManifest(
        session_id=directory.name,
        created_at=datetime(2024, 1, 1, tzinfo=timezone.utc),
        artifacts=artifacts,
        status=SessionStatus.COLLECTING,
        participant=participant,
    )
    (directory / "manifest.json").write_text(
        json.dumps(manifest.as_dict(), indent=1), encoding="utf-8"
    )
    return manifest
