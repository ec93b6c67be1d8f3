"""Input parsing and validation for uploaded task artifacts.

Two artifact formats come in from recording clients:

* RIFF/WAVE, PCM 16-bit, mono or stereo, for the speech task;
* ``.ljsonl`` landmark tracks (one JSON object per line) for the face and
  motor tasks, carrying pre-extracted landmark frames and, for faces,
  action-unit intensities.

Raw video never enters the pipeline; landmark extraction happens on the
client side and this module is the trust boundary for its output.
"""
from __future__ import annotations

import enum
import json
import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np

HAND_POINT_COUNT = 21
FACE_POINT_COUNT = 468

DEFAULT_MAX_GAP_S = 0.2

# a gap wider than this many nominal frame intervals gets interpolated
_GAP_FILL_TRIGGER = 1.5


class IngestError(Exception):
    """Base class for artifact parsing/validation failures."""


class NotWav(IngestError):
    pass


class UnsupportedEncoding(IngestError):
    pass


class EmptyAudio(IngestError):
    pass


class MalformedLine(IngestError):
    def __init__(self, line_no: int, detail: str):
        super().__init__(f"line {line_no}: {detail}")
        self.line_no = line_no


class WrongPointCount(IngestError):
    def __init__(self, line_no: int, expected: int, got: int):
        super().__init__(f"line {line_no}: expected {expected} points, got {got}")
        self.line_no = line_no


class NonMonotonicTime(IngestError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: timestamp not strictly increasing")
        self.line_no = line_no


class TooFewFrames(IngestError):
    pass


@dataclass(frozen=True)
class AudioClip:
    """Mono PCM samples in [-1, 1] at a known sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


class TrackKind(str, enum.Enum):
    HAND = "hand"
    FACE = "face"


POINT_COUNTS = {TrackKind.HAND: HAND_POINT_COUNT, TrackKind.FACE: FACE_POINT_COUNT}


@dataclass(frozen=True)
class LandmarkFrame:
    """One timestamped landmark snapshot; ``aus`` is face-only."""

    t: float
    points: np.ndarray  # (n_points, 3)
    aus: dict[str, float] | None = None


@dataclass(frozen=True)
class LandmarkTrack:
    """A validated landmark time series.

    ``segment_breaks`` holds indices i where a recording discontinuity sits
    between frames[i-1] and frames[i] (filled in by :func:`gap_fill`).
    """

    kind: TrackKind
    frames: tuple[LandmarkFrame, ...]
    nominal_fps: float
    segment_breaks: tuple[int, ...] = field(default=())

    @property
    def times(self) -> np.ndarray:
        return np.array([f.t for f in self.frames])


# --- WAV ------------------------------------------------------------------

def parse_wav(data: bytes) -> AudioClip:
    """Decode a PCM16 RIFF/WAVE container into a mono clip.

    Samples are normalized by 32768; stereo is downmixed by per-frame
    channel average.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotWav("missing RIFF/WAVE header")

    fmt = None
    pcm = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise NotWav("truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            pcm = body
        # chunks are word-aligned
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None or pcm is None:
        raise NotWav("missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1 or bits != 16:
        raise UnsupportedEncoding(
            f"only PCM16 is supported (format={audio_format}, bits={bits})"
        )
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"unsupported channel count {channels}")
    if sample_rate <= 0:
        raise NotWav("non-positive sample rate")
    if len(pcm) < 2:
        raise EmptyAudio("zero-length data chunk")

    pcm = pcm[: len(pcm) - (len(pcm) % (2 * channels))]
    if not pcm:
        raise EmptyAudio("zero-length data chunk")
    raw = np.frombuffer(pcm, dtype="<i2").astype(np.float64) / 32768.0
    if channels == 2:
        raw = raw.reshape(-1, 2).mean(axis=1)
    return AudioClip(samples=raw, sample_rate_hz=sample_rate)


def write_wav(clip: AudioClip, *, clamp: bool = True) -> bytes:
    """Encode a clip as mono PCM16 WAV; inverse of :func:`parse_wav` up to
    the 1/32768 quantization step."""
    samples = np.asarray(clip.samples, dtype=np.float64)
    if clamp:
        samples = np.clip(samples, -1.0, 1.0)
    ints = np.clip(np.round(samples * 32768.0), -32768, 32767).astype("<i2")
    pcm = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(pcm),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        clip.sample_rate_hz,
        clip.sample_rate_hz * 2,
        2,
        16,
        b"data",
        len(pcm),
    )
    return header + pcm


# --- landmark tracks ------------------------------------------------------

def _parse_frame(obj: dict, line_no: int, expected_points: int) -> LandmarkFrame:
    if not isinstance(obj, dict):
        raise MalformedLine(line_no, "not a JSON object")
    try:
        t = float(obj["t"])
        points = obj["points"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedLine(line_no, f"missing/invalid field: {exc}") from exc
    if not math.isfinite(t) or t < 0:
        raise MalformedLine(line_no, "timestamp must be a finite non-negative number")
    if not isinstance(points, list):
        raise MalformedLine(line_no, "points must be a list")
    if len(points) != expected_points:
        raise WrongPointCount(line_no, expected_points, len(points))

    arr = np.zeros((expected_points, 3))
    for i, p in enumerate(points):
        if not isinstance(p, list) or len(p) not in (2, 3):
            raise MalformedLine(line_no, f"point {i} must be [x, y] or [x, y, z]")
        try:
            vals = [float(v) for v in p]
        except (TypeError, ValueError) as exc:
            raise MalformedLine(line_no, f"point {i} has non-numeric value") from exc
        if not all(math.isfinite(v) for v in vals):
            raise MalformedLine(line_no, f"point {i} has non-finite value")
        arr[i, : len(vals)] = vals

    aus = None
    if "aus" in obj and obj["aus"] is not None:
        raw = obj["aus"]
        if not isinstance(raw, dict):
            raise MalformedLine(line_no, "aus must be an object")
        aus = {}
        for k, v in raw.items():
            try:
                fv = float(v)
            except (TypeError, ValueError) as exc:
                raise MalformedLine(line_no, f"AU {k} has non-numeric intensity") from exc
            if not math.isfinite(fv) or fv < 0:
                raise MalformedLine(line_no, f"AU {k} intensity must be finite and >= 0")
            aus[str(k)] = fv
    return LandmarkFrame(t=t, points=arr, aus=aus)


def parse_track(text: str, kind: TrackKind) -> LandmarkTrack:
    """Parse a ``.ljsonl`` landmark track (one JSON object per line)."""
    expected = POINT_COUNTS[kind]
    frames: list[LandmarkFrame] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc.msg}") from exc
        frame = _parse_frame(obj, line_no, expected)
        if frames and frame.t <= frames[-1].t:
            raise NonMonotonicTime(line_no)
        frames.append(frame)

    if len(frames) < 2:
        raise TooFewFrames(f"need at least 2 frames, got {len(frames)}")
    span = frames[-1].t - frames[0].t
    nominal_fps = (len(frames) - 1) / span
    return LandmarkTrack(kind=kind, frames=tuple(frames), nominal_fps=nominal_fps)


def track_to_ljsonl(track: LandmarkTrack) -> str:
    """Serialize a track back to the ``.ljsonl`` wire format."""
    lines = []
    for frame in track.frames:
        obj: dict = {
            "t": float(frame.t),
            "points": [[float(v) for v in p] for p in frame.points],
        }
        if frame.aus is not None:
            obj["aus"] = {k: float(v) for k, v in sorted(frame.aus.items())}
        lines.append(json.dumps(obj))
    return "\n".join(lines) + "\n"


def _interp_aus(a: dict | None, b: dict | None, w: float) -> dict | None:
    if a is None or b is None:
        return None
    keys = set(a) & set(b)
    return {k: (1.0 - w) * a[k] + w * b[k] for k in sorted(keys)}


def gap_fill(track: LandmarkTrack, max_gap_s: float = DEFAULT_MAX_GAP_S) -> LandmarkTrack:
    """Close short dropout gaps by linear interpolation at the nominal rate.

    Gaps wider than ``max_gap_s`` are left in place and recorded as segment
    breaks instead. Idempotent: re-running on the output is a no-op.
    """
    dt_nominal = 1.0 / track.nominal_fps
    old_breaks = set(track.segment_breaks)

    frames: list[LandmarkFrame] = [track.frames[0]]
    breaks: list[int] = []
    for i in range(1, len(track.frames)):
        prev, cur = track.frames[i - 1], track.frames[i]
        dt = cur.t - prev.t
        if i in old_breaks or dt > max_gap_s:
            # never interpolate across a discontinuity
            breaks.append(len(frames))
        elif dt > _GAP_FILL_TRIGGER * dt_nominal:
            n_missing = int(round(dt / dt_nominal)) - 1
            for j in range(1, n_missing + 1):
                w = j / (n_missing + 1)
                frames.append(
                    LandmarkFrame(
                        t=prev.t + w * dt,
                        points=(1.0 - w) * prev.points + w * cur.points,
                        aus=_interp_aus(prev.aus, cur.aus, w),
                    )
                )
        frames.append(cur)

    return replace(
        track,
        frames=tuple(frames),
        segment_breaks=tuple(sorted(set(breaks))),
    )
