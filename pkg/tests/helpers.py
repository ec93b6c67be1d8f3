"""Constructed signals and naive oracles shared across test modules.

Everything here is deliberately simple and independent of the library's
own implementations: naive DFT sums, brute-force pair counting, loop-based
peak scanning. These are the reference answers the fast paths must match.
"""
from __future__ import annotations

import numpy as np

from pdscreen.ingest import AudioClip, LandmarkFrame, LandmarkTrack, TrackKind
from pdscreen.motor import (
    DEFAULT_MIN_PERIOD_S,
    DEFAULT_PROMINENCE_FRAC,
    ApertureSignal,
)


def sine_clip(f0: float, duration_s: float = 1.0, rate: int = 16000, amp: float = 0.7) -> AudioClip:
    t = np.arange(int(duration_s * rate)) / rate
    return AudioClip(samples=amp * np.sin(2 * np.pi * f0 * t), sample_rate_hz=rate)


def cyclic_clip(
    f0: float,
    period_factors: list[float],
    amps: list[float],
    duration_s: float = 2.0,
    rate: int = 16000,
) -> AudioClip:
    """A tone built cycle by cycle with prescribed per-cycle period
    multipliers and peak amplitudes (phase restarts at 0 each cycle)."""
    n_total = int(duration_s * rate)
    x = np.zeros(n_total)
    pos = 0.0
    k = 0
    while pos < n_total:
        pf = period_factors[k % len(period_factors)]
        amp = amps[k % len(amps)]
        period_n = pf / f0 * rate
        start = int(np.ceil(pos))
        end = min(int(np.ceil(pos + period_n)), n_total)
        if end <= start:
            break
        phase = (np.arange(start, end) - pos) / period_n
        x[start:end] = amp * np.sin(2 * np.pi * phase)
        pos += period_n
        k += 1
    return AudioClip(samples=x, sample_rate_hz=rate)


def naive_dft_power(frame: np.ndarray) -> np.ndarray:
    """O(N^2) direct-summation DFT power spectrum, matching rfft bins."""
    n = len(frame)
    ks = np.arange(n // 2 + 1)
    out = np.empty(len(ks))
    angles = -2j * np.pi * np.arange(n) / n
    for i, k in enumerate(ks):
        out[i] = np.abs(np.sum(frame * np.exp(angles * k))) ** 2
    return out / n


def brute_force_auc(scores, labels) -> float:
    """Explicit pair enumeration with loops."""
    scores = list(scores)
    labels = list(labels)
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y != 1]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def brute_force_taps(
    a: np.ndarray,
    t: np.ndarray,
    min_prominence: float | None = None,
    min_period_s: float = DEFAULT_MIN_PERIOD_S,
) -> list[int]:
    """Loop-based re-statement of the tap qualification rule.

    Returns the indices of accepted peaks: plateau-aware local maxima whose
    drop to the adjacent inter-candidate valleys reaches the prominence
    floor, spacing-collapsed keeping the taller, with a censored-onset
    first peak discarded.
    """
    if min_prominence is None:
        min_prominence = DEFAULT_PROMINENCE_FRAC * (max(a) - min(a))

    candidates = []
    i = 1
    n = len(a)
    while i < n - 1:
        if a[i] > a[i - 1]:
            j = i
            while j + 1 < n and a[j + 1] == a[i]:
                j += 1
            if j < n - 1 and a[j + 1] < a[i]:
                candidates.append(i)
            i = j + 1
        else:
            i += 1

    qualified = []
    for k, i in enumerate(candidates):
        lo = candidates[k - 1] if k > 0 else 0
        hi = candidates[k + 1] if k + 1 < len(candidates) else n - 1
        left_valley = min(a[lo : i + 1])
        right_valley = min(a[i : hi + 1])
        if a[i] - max(left_valley, right_valley) >= min_prominence:
            qualified.append(i)

    accepted: list[int] = []
    for i in qualified:
        if accepted and t[i] - t[accepted[-1]] < min_period_s:
            if a[i] > a[accepted[-1]]:
                accepted[-1] = i
        else:
            accepted.append(i)

    if accepted:
        first = accepted[0]
        valley_idx = int(np.argmin(a[: first + 1]))
        if valley_idx == 0 and a[0] > min(a) + min_prominence:
            accepted = accepted[1:]
    return accepted


def make_hand_frames(apertures: np.ndarray, times: np.ndarray, scale: float = 1.0):
    """Hand frames whose aperture signal equals ``apertures`` exactly."""
    frames = []
    for ap, tt in zip(apertures, times):
        pts = np.zeros((21, 3))
        pts[0] = (0.0, 0.0, 0.0)
        pts[9] = (0.0, 1.0, 0.0)
        pts[4] = (0.5, 0.5, 0.0)
        pts[8] = pts[4] + np.array([ap, 0.0, 0.0])
        frames.append(LandmarkFrame(t=float(tt), points=pts * scale, aus=None))
    return frames


def hand_track(apertures: np.ndarray, fps: float = 50.0, scale: float = 1.0) -> LandmarkTrack:
    times = np.arange(len(apertures)) / fps
    return LandmarkTrack(
        kind=TrackKind.HAND,
        frames=tuple(make_hand_frames(apertures, times, scale)),
        nominal_fps=fps,
    )


def aperture_signal(a: np.ndarray, dt: float = 0.01) -> ApertureSignal:
    return ApertureSignal(t=np.arange(len(a)) * dt, a=np.asarray(a, dtype=np.float64))


def face_frames(
    n_frames: int,
    fps: float = 30.0,
    au_series: dict[str, np.ndarray] | None = None,
    point_mover=None,
):
    """Face frames on a fixed mesh; ``point_mover(i, pts)`` may displace
    landmarks per frame, ``au_series`` supplies AU intensities."""
    base = np.zeros((468, 3))
    rng = np.random.default_rng(99)
    base[:, :2] = rng.uniform(-0.5, 0.5, (468, 2))
    base[33] = (-0.3, 0.0, 0.0)
    base[263] = (0.3, 0.0, 0.0)
    base[61] = (-0.15, -0.35, 0.0)
    base[291] = (0.15, -0.35, 0.0)
    base[70] = (-0.25, 0.25, 0.0)
    base[300] = (0.25, 0.25, 0.0)
    base[105] = (-0.15, 0.28, 0.0)
    base[334] = (0.15, 0.28, 0.0)
    base[13] = (0.0, -0.33, 0.0)
    base[14] = (0.0, -0.37, 0.0)

    frames = []
    for i in range(n_frames):
        pts = base.copy()
        if point_mover is not None:
            point_mover(i, pts)
        aus = None
        if au_series is not None:
            aus = {k: float(v[i]) for k, v in au_series.items()}
        frames.append(LandmarkFrame(t=i / fps, points=pts, aus=aus))
    return frames


def face_track(
    n_frames: int = 30,
    fps: float = 30.0,
    au_series: dict[str, np.ndarray] | None = None,
    point_mover=None,
) -> LandmarkTrack:
    if au_series is None:
        au_series = {"AU12": np.zeros(n_frames)}
    return LandmarkTrack(
        kind=TrackKind.FACE,
        frames=tuple(face_frames(n_frames, fps, au_series, point_mover)),
        nominal_fps=fps,
    )
