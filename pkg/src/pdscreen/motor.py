"""Finger-tapping kinematics from hand landmark tracks.

The aperture signal is the thumb-tip to index-tip distance normalized by
hand size (wrist to middle-finger MCP), which makes every downstream
feature invariant to camera distance. The ``motor.v1`` vector encodes the
clinically rated tapping dimensions: speed, amplitude, decrement,
hesitations, and interruptions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FeatureVector
from .ingest import LandmarkTrack, TrackKind

MOTOR_SCHEMA_ID = "motor.v1"

# MediaPipe Hands topology
WRIST = 0
THUMB_TIP = 4
INDEX_TIP = 8
MIDDLE_MCP = 9

DEFAULT_PROMINENCE_FRAC = 0.15
DEFAULT_MIN_PERIOD_S = 0.1
MIN_SIGNAL_S = 2.0
HESITATION_ITI_FACTOR = 2.0
FREEZE_SPEED_FRAC = 0.05


class MotorError(Exception):
    pass


class DegenerateGeometry(MotorError):
    pass


class SignalTooShort(MotorError):
    pass


class TooFewTaps(MotorError):
    pass


@dataclass(frozen=True)
class ApertureSignal:
    """Normalized thumb-index distance over time."""

    t: np.ndarray
    a: np.ndarray
    segment_breaks: tuple[int, ...] = ()

    @property
    def duration_s(self) -> float:
        return float(self.t[-1] - self.t[0])


@dataclass(frozen=True)
class TapEvent:
    t_peak: float
    amplitude: float
    rise_speed: float
    fall_speed: float


def aperture(track: LandmarkTrack) -> ApertureSignal:
    """Per-frame normalized aperture ``|thumb - index| / |wrist - mcp|``."""
    if track.kind != TrackKind.HAND:
        raise ValueError("aperture needs a hand track")
    pts = np.stack([f.points for f in track.frames])
    hand_size = np.linalg.norm(pts[:, WRIST] - pts[:, MIDDLE_MCP], axis=1)
    if np.any(hand_size < 1e-6):
        raise DegenerateGeometry("wrist-to-MCP distance collapsed to zero")
    gap = np.linalg.norm(pts[:, THUMB_TIP] - pts[:, INDEX_TIP], axis=1)
    return ApertureSignal(
        t=track.times,
        a=gap / hand_size,
        segment_breaks=track.segment_breaks,
    )


def _local_maxima(a: np.ndarray) -> list[int]:
    """Indices of local maxima; a plateau counts once, at its first sample."""
    out = []
    n = len(a)
    i = 1
    while i < n - 1:
        if a[i] > a[i - 1]:
            j = i
            while j + 1 < n and a[j + 1] == a[i]:
                j += 1
            if j < n - 1 and a[j + 1] < a[i]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out


def _qualify_candidates(
    a: np.ndarray, candidates: list[int], min_prominence: float
) -> list[int]:
    """Keep maxima whose drop to the adjacent valleys (both sides) is large
    enough; valleys are measured between neighbouring candidate maxima."""
    kept = []
    for k, i in enumerate(candidates):
        lo = candidates[k - 1] if k > 0 else 0
        hi = candidates[k + 1] if k + 1 < len(candidates) else len(a) - 1
        left_valley = a[lo : i + 1].min()
        right_valley = a[i : hi + 1].min()
        if a[i] - max(left_valley, right_valley) >= min_prominence:
            kept.append(i)
    return kept


def _enforce_spacing(
    a: np.ndarray, t: np.ndarray, peaks: list[int], min_period_s: float
) -> list[int]:
    """Collapse peaks closer than the refractory period, keeping the taller."""
    out: list[int] = []
    for i in peaks:
        if out and t[i] - t[out[-1]] < min_period_s:
            if a[i] > a[out[-1]]:
                out[-1] = i
        else:
            out.append(i)
    return out


def detect_taps(
    sig: ApertureSignal,
    min_prominence: float | None = None,
    min_period_s: float = DEFAULT_MIN_PERIOD_S,
) -> list[TapEvent]:
    """One TapEvent per qualifying aperture maximum.

    A maximum qualifies when its prominence (drop to the higher of the two
    adjacent valleys) reaches ``min_prominence`` — default 15% of the
    signal's range — and peaks within ``min_period_s`` of each other
    collapse to the taller one. Amplitude is peak minus preceding valley;
    rise/fall speeds are the mean slopes from/to the adjacent valleys.
    """
    if sig.duration_s < MIN_SIGNAL_S:
        raise SignalTooShort(
            f"need >= {MIN_SIGNAL_S:.0f} s of signal, got {sig.duration_s:.2f} s"
        )
    a, t = sig.a, sig.t
    if min_prominence is None:
        min_prominence = DEFAULT_PROMINENCE_FRAC * float(a.max() - a.min())

    candidates = _local_maxima(a)
    qualified = _qualify_candidates(a, candidates, min_prominence)
    peaks = _enforce_spacing(a, t, qualified, min_period_s)

    events = []
    first_valley_idx = None
    for k, i in enumerate(peaks):
        lo = peaks[k - 1] if k > 0 else 0
        hi = peaks[k + 1] if k + 1 < len(peaks) else len(a) - 1
        lv = lo + int(np.argmin(a[lo : i + 1]))
        rv = i + int(np.argmin(a[i : hi + 1]))
        if k == 0:
            first_valley_idx = lv
        amplitude = float(a[i] - a[lv])
        rise = amplitude / max(t[i] - t[lv], 1e-9)
        fall = float(a[i] - a[rv]) / max(t[rv] - t[i], 1e-9)
        events.append(
            TapEvent(
                t_peak=float(t[i]),
                amplitude=amplitude,
                rise_speed=float(rise),
                fall_speed=float(fall),
            )
        )

    # if the recording starts mid-rise, the first peak's preceding valley is
    # censored by the signal edge and its amplitude is only a lower bound
    if (
        events
        and first_valley_idx == 0
        and a[0] > float(a.min()) + min_prominence
    ):
        events = events[1:]
    return events


MOTOR_FEATURE_NAMES = (
    "tap_rate_hz",
    "amp_mean",
    "amp_std",
    "amp_cv",
    "amp_decrement_slope",
    "iti_mean_s",
    "iti_cv",
    "rise_speed_mean",
    "fall_speed_mean",
    "hesitation_count",
    "freeze_fraction",
    "interruption_count",
)


def extract_motor_features(
    sig: ApertureSignal,
    taps: list[TapEvent] | None = None,
    min_prominence: float | None = None,
    min_period_s: float = DEFAULT_MIN_PERIOD_S,
) -> FeatureVector:
    """The ``motor.v1`` vector for one hand's tapping signal."""
    if taps is None:
        taps = detect_taps(sig, min_prominence, min_period_s)
    if len(taps) < 4:
        raise TooFewTaps(f"need >= 4 taps, found {len(taps)}")

    t_peaks = np.array([e.t_peak for e in taps])
    amps = np.array([e.amplitude for e in taps])
    itis = np.diff(t_peaks)

    tap_rate = (len(taps) - 1) / float(t_peaks[-1] - t_peaks[0])
    amp_mean = float(amps.mean())
    amp_std = float(amps.std())
    amp_cv = amp_std / amp_mean if amp_mean > 0 else 0.0

    # least-squares slope of amplitude vs tap index, in units of mean
    # amplitude per tap (negative = decrement)
    idx = np.arange(len(amps), dtype=np.float64)
    slope = float(np.polyfit(idx, amps, 1)[0])
    decrement_slope = slope / amp_mean if amp_mean > 0 else 0.0

    iti_mean = float(itis.mean())
    iti_cv = float(itis.std() / iti_mean) if iti_mean > 0 else 0.0
    rise_mean = float(np.mean([e.rise_speed for e in taps]))
    fall_mean = float(np.mean([e.fall_speed for e in taps]))

    hesitations = float(np.sum(itis > HESITATION_ITI_FACTOR * np.median(itis)))

    dt = np.diff(sig.t)
    speed = np.abs(np.diff(sig.a)) / np.maximum(dt, 1e-9)
    median_speed = float(np.median(speed))
    frozen = speed < FREEZE_SPEED_FRAC * median_speed
    freeze_fraction = float(np.sum(dt[frozen]) / np.sum(dt))

    values = (
        float(tap_rate),
        amp_mean,
        amp_std,
        float(amp_cv),
        float(decrement_slope),
        iti_mean,
        iti_cv,
        rise_mean,
        fall_mean,
        hesitations,
        freeze_fraction,
        float(len(sig.segment_breaks)),
    )
    return FeatureVector(
        schema_id=MOTOR_SCHEMA_ID, names=MOTOR_FEATURE_NAMES, values=values
    )
