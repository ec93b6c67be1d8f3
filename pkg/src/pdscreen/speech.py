"""Acoustic feature extraction from the pangram recording.

The ``speech.v1`` schema covers the canonical voice-screening feature
families: pitch statistics, jitter and shimmer, MFCC statistics, pause
structure, an energy-peak rate proxy, and a harmonics-to-noise proxy.
All thresholds are relative to the clip's own level, so the output is
invariant to recording gain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FeatureVector
from .ingest import AudioClip

SPEECH_SCHEMA_ID = "speech.v1"

DEFAULT_FRAME_S = 0.025
DEFAULT_HOP_S = 0.010
DEFAULT_F0_MIN_HZ = 75.0
DEFAULT_F0_MAX_HZ = 500.0
DEFAULT_VOICING_THRESHOLD = 0.45
DEFAULT_SILENCE_RMS_FRAC = 0.02
DEFAULT_PAUSE_MIN_S = 0.150
DEFAULT_N_MELS = 26
DEFAULT_N_COEFFS = 13

MIN_CLIP_S = 1.0

# how close (in normalized correlation) a shorter-lag peak must come to the
# row's best peak to win the octave tie-break
_OCTAVE_TOL = 0.025


class SpeechError(Exception):
    pass


class ClipTooShort(SpeechError):
    pass


class InsufficientVoicing(SpeechError):
    pass


@dataclass(frozen=True)
class PitchTrack:
    """Per-frame fundamental frequency; f0 is 0 where unvoiced."""

    frame_times: np.ndarray
    f0_hz: np.ndarray
    voiced_flags: np.ndarray
    peak_strength: np.ndarray  # normalized autocorrelation peak per frame


def _frame_starts(n_samples: int, frame_len: int, hop_len: int) -> np.ndarray:
    n_frames = (n_samples - frame_len) // hop_len + 1
    return np.arange(n_frames) * hop_len


def _frame_matrix(samples: np.ndarray, frame_len: int, hop_len: int) -> np.ndarray:
    starts = _frame_starts(len(samples), frame_len, hop_len)
    idx = starts[:, None] + np.arange(frame_len)[None, :]
    return samples[idx]


def frame_signal(
    clip: AudioClip,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
) -> np.ndarray:
    """Slice the clip into Hann-windowed frames of shape (n_frames, frame_len)."""
    if not frame_s >= hop_s > 0:
        raise ValueError("need frame_s >= hop_s > 0")
    frame_len = int(round(frame_s * clip.sample_rate_hz))
    hop_len = int(round(hop_s * clip.sample_rate_hz))
    if len(clip.samples) < frame_len:
        raise ClipTooShort(
            f"clip has {len(clip.samples)} samples, frame needs {frame_len}"
        )
    return _frame_matrix(clip.samples, frame_len, hop_len) * np.hanning(frame_len)


def _normalized_autocorr(frames: np.ndarray, lag_min: int, lag_max: int) -> np.ndarray:
    """Normalized cross-correlation of each frame with itself over a lag range.

    r[tau] = sum(x[n] x[n+tau]) / sqrt(sum_head(x^2) * sum_tail(x^2)),
    computed for tau in [lag_min, lag_max]; zero where a segment is silent.
    """
    n_frames, frame_len = frames.shape
    nfft = 1 << int(np.ceil(np.log2(2 * frame_len)))
    spectra = np.fft.rfft(frames, n=nfft, axis=1)
    raw = np.fft.irfft(spectra * np.conj(spectra), n=nfft, axis=1)[:, : frame_len]

    sq = frames ** 2
    total = sq.sum(axis=1, keepdims=True)
    suffix = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1]  # suffix[:, k] = sum sq[k:]
    lags = np.arange(lag_min, lag_max + 1)
    head = total - suffix[:, frame_len - lags]  # energy of x[0 : L-tau]
    tail = suffix[:, lags]                      # energy of x[tau : L]

    denom = np.sqrt(head * tail)
    out = np.zeros((n_frames, len(lags)))
    ok = denom > 1e-12
    out[ok] = raw[:, lag_min : lag_max + 1][ok] / denom[ok]
    return out


def pitch_track(
    clip: AudioClip,
    f0_min: float = DEFAULT_F0_MIN_HZ,
    f0_max: float = DEFAULT_F0_MAX_HZ,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
    voicing_threshold: float = DEFAULT_VOICING_THRESHOLD,
) -> PitchTrack:
    """Per-frame f0 from the normalized autocorrelation peak.

    Frames whose best peak falls below ``voicing_threshold`` are unvoiced.
    The peak lag is refined by parabolic interpolation, then clamped to
    [f0_min, f0_max].
    """
    if not f0_min < f0_max:
        raise ValueError("need f0_min < f0_max")
    rate = clip.sample_rate_hz
    frame_len = int(round(frame_s * rate))
    hop_len = int(round(hop_s * rate))
    lag_min = max(2, int(np.ceil(rate / f0_max)))
    lag_max = int(np.floor(rate / f0_min))
    if lag_max >= frame_len - 1:
        # widen the analysis frame so the longest period fits
        frame_len = lag_max + 2
    if len(clip.samples) < frame_len:
        raise ClipTooShort(
            f"clip has {len(clip.samples)} samples, pitch frame needs {frame_len}"
        )

    frames = _frame_matrix(clip.samples, frame_len, hop_len)
    starts = _frame_starts(len(clip.samples), frame_len, hop_len)
    times = (starts + frame_len / 2) / rate

    corr = _normalized_autocorr(frames, lag_min - 1, min(lag_max + 1, frame_len - 1))
    # columns of corr correspond to lags lag_min-1 .. lag_max+1; search the
    # interior so every winning peak has both neighbours for interpolation.
    # A periodic signal correlates equally at every multiple of its true
    # period, so take the SMALLEST lag whose local maximum comes within
    # _OCTAVE_TOL of the row's best — not the argmax — to avoid octave drops.
    interior = corr[:, 1:-1]
    is_peak = (interior > corr[:, :-2]) & (interior >= corr[:, 2:])
    rowmax = interior.max(axis=1)
    near_best = is_peak & (interior >= (rowmax - _OCTAVE_TOL)[:, None])
    has_peak = near_best.any(axis=1)
    best = np.where(has_peak, np.argmax(near_best, axis=1), np.argmax(interior, axis=1))
    rows = np.arange(len(frames))
    peak_val = interior[rows, best]

    left = corr[rows, best]
    mid = corr[rows, best + 1]
    right = corr[rows, best + 2]
    denom = left - 2 * mid + right
    shift = np.zeros(len(frames))
    usable = np.abs(denom) > 1e-12
    shift[usable] = 0.5 * (left[usable] - right[usable]) / denom[usable]
    shift = np.clip(shift, -0.5, 0.5)
    lag = best + lag_min + shift

    f0 = np.where(lag > 0, rate / np.maximum(lag, 1e-9), 0.0)
    f0 = np.clip(f0, f0_min, f0_max)
    voiced = peak_val >= voicing_threshold
    f0 = np.where(voiced, f0, 0.0)
    return PitchTrack(
        frame_times=times,
        f0_hz=f0,
        voiced_flags=voiced,
        peak_strength=np.maximum(peak_val, 0.0),
    )


def _refine_peak(x: np.ndarray, i: int) -> tuple[float, float]:
    """Sub-sample peak position and height by parabolic interpolation at i."""
    if i <= 0 or i >= len(x) - 1:
        return float(i), float(x[i])
    a, b, c = x[i - 1], x[i], x[i + 1]
    denom = a - 2 * b + c
    if abs(denom) < 1e-18:
        return float(i), float(b)
    shift = 0.5 * (a - c) / denom
    shift = float(np.clip(shift, -0.5, 0.5))
    height = b - 0.25 * (a - c) * shift
    return i + shift, float(height)


def _mark_periods(
    samples: np.ndarray, start: int, end: int, period_samples: float
) -> tuple[np.ndarray, np.ndarray]:
    """Pitch marks (one per glottal cycle) inside [start, end).

    Marks sit on upward zero crossings, refined to sub-sample precision by
    linear interpolation, and consecutive marks closer than 0.7 nominal
    periods collapse to the first. Returns (mark positions in samples,
    per-cycle peak amplitudes); consecutive mark differences are the period
    lengths used for jitter.
    """
    seg = samples[start:end] - np.mean(samples[start:end])
    rising = np.nonzero((seg[:-1] < 0) & (seg[1:] >= 0))[0]
    marks: list[float] = []
    for i in rising:
        frac = seg[i] / (seg[i] - seg[i + 1])
        pos = start + i + float(frac)
        if marks and pos - marks[-1] < 0.7 * period_samples:
            continue
        marks.append(pos)

    amps = []
    for a, b in zip(marks[:-1], marks[1:]):
        lo, hi = int(np.ceil(a)), max(int(np.ceil(b)), int(np.ceil(a)) + 1)
        i = lo + int(np.argmax(np.abs(samples[lo:hi])))
        _, height = _refine_peak(np.abs(samples), i)
        amps.append(height)
    return np.asarray(marks), np.asarray(amps)


def _voiced_spans(pitch: PitchTrack, rate: int, hop_len: int, frame_len: int):
    """Contiguous voiced frame runs as sample ranges."""
    spans = []
    run_start = None
    flags = pitch.voiced_flags
    for i, v in enumerate(flags):
        if v and run_start is None:
            run_start = i
        elif not v and run_start is not None:
            spans.append((run_start, i - 1))
            run_start = None
    if run_start is not None:
        spans.append((run_start, len(flags) - 1))
    out = []
    for a, b in spans:
        out.append((a * hop_len, b * hop_len + frame_len))
    return out


def jitter_shimmer(
    clip: AudioClip,
    pitch: PitchTrack,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
) -> tuple[float, float]:
    """Cycle-to-cycle period and amplitude perturbation ratios.

    jitter  = mean |T_{i+1} - T_i| / mean T_i over consecutive periods;
    shimmer = mean |A_{i+1} - A_i| / mean A_i over per-cycle peak heights.
    Periods are measured between sub-sample pitch marks (upward zero
    crossings) inside voiced spans.
    """
    voiced_f0 = pitch.f0_hz[pitch.voiced_flags]
    if len(voiced_f0) < 3:
        raise InsufficientVoicing("need at least 3 voiced frames")
    rate = clip.sample_rate_hz
    period_samples = rate / float(np.median(voiced_f0))
    frame_len = int(round(frame_s * rate))
    hop_len = int(round(hop_s * rate))

    periods: list[float] = []
    period_deltas: list[float] = []
    amps: list[float] = []
    amp_deltas: list[float] = []
    for start, end in _voiced_spans(pitch, rate, hop_len, frame_len):
        marks, span_amps = _mark_periods(clip.samples, start, end, period_samples)
        if len(marks) < 2:
            continue
        span_periods = np.diff(marks) / rate
        periods.extend(span_periods)
        period_deltas.extend(np.abs(np.diff(span_periods)))
        amps.extend(span_amps)
        amp_deltas.extend(np.abs(np.diff(span_amps)))

    if len(periods) < 3 or not period_deltas:
        raise InsufficientVoicing(
            f"found {len(periods)} periods, need at least 3 consecutive"
        )
    jitter = float(np.mean(period_deltas) / np.mean(periods))
    shimmer = float(np.mean(amp_deltas) / np.mean(amps))
    return jitter, shimmer


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_bins: int, rate: int, frame_len: int) -> np.ndarray:
    """Triangular mel filterbank evaluated at the DFT bin frequencies.

    Rows are the filters; each row sums to a positive value (no all-zero
    filter) for the supported rates and frame sizes.
    """
    bin_freqs = np.arange(n_bins) * rate / frame_len
    edges = mel_to_hz(np.linspace(hz_to_mel(0.0), hz_to_mel(rate / 2.0), n_mels + 2))
    fb = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        lo, center, hi = edges[m], edges[m + 1], edges[m + 2]
        up = (bin_freqs - lo) / max(center - lo, 1e-12)
        down = (hi - bin_freqs) / max(hi - center, 1e-12)
        fb[m] = np.maximum(0.0, np.minimum(up, down))
    return fb


def _dct_ii_ortho(n_out: int, n_in: int) -> np.ndarray:
    k = np.arange(n_out)[:, None]
    n = np.arange(n_in)[None, :]
    mat = np.cos(np.pi * k * (2 * n + 1) / (2 * n_in)) * np.sqrt(2.0 / n_in)
    mat[0] /= np.sqrt(2.0)
    return mat


def mel_energies(
    clip: AudioClip,
    n_mels: int = DEFAULT_N_MELS,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
) -> np.ndarray:
    """Per-frame mel filterbank energies from the Hann-windowed DFT power
    spectrum (no zero padding: DFT length = frame length)."""
    frames = frame_signal(clip, frame_s, hop_s)
    frame_len = frames.shape[1]
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2 / frame_len
    fb = mel_filterbank(n_mels, power.shape[1], clip.sample_rate_hz, frame_len)
    return power @ fb.T


def mfcc(
    clip: AudioClip,
    n_mels: int = DEFAULT_N_MELS,
    n_coeffs: int = DEFAULT_N_COEFFS,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
) -> np.ndarray:
    """Per-frame MFCCs: mel filterbank -> log -> orthonormal DCT-II."""
    energies = mel_energies(clip, n_mels, frame_s, hop_s)
    log_e = np.log(np.maximum(energies, 1e-12))
    dct = _dct_ii_ortho(n_coeffs, n_mels)
    return log_e @ dct.T


def _frame_rms(samples: np.ndarray, frame_len: int, hop_len: int) -> np.ndarray:
    frames = _frame_matrix(samples, frame_len, hop_len)
    return np.sqrt(np.mean(frames ** 2, axis=1))


def trim_silence(
    clip: AudioClip,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
    silence_rms_frac: float = DEFAULT_SILENCE_RMS_FRAC,
) -> AudioClip:
    """Drop leading/trailing frames whose RMS is below the relative floor."""
    rate = clip.sample_rate_hz
    frame_len = int(round(frame_s * rate))
    hop_len = int(round(hop_s * rate))
    if len(clip.samples) < frame_len:
        raise ClipTooShort("clip shorter than one frame")
    rms = _frame_rms(clip.samples, frame_len, hop_len)
    threshold = silence_rms_frac * rms.max()
    loud = np.nonzero(rms > threshold)[0]
    if len(loud) == 0:
        raise ClipTooShort("clip is entirely silence")
    start = loud[0] * hop_len
    end = loud[-1] * hop_len + frame_len
    return AudioClip(samples=clip.samples[start:end], sample_rate_hz=rate)


SPEECH_FEATURE_NAMES = (
    "f0_mean_hz",
    "f0_std_hz",
    "f0_range_hz",
    "voiced_fraction",
    "jitter_local",
    "shimmer_local",
    *(f"mfcc{i:02d}_mean" for i in range(DEFAULT_N_COEFFS)),
    *(f"mfcc{i:02d}_std" for i in range(DEFAULT_N_COEFFS)),
    "energy_peak_rate_hz",
    "pause_count",
    "pause_mean_s",
    "hnr_proxy",
)


def extract_speech_features(
    clip: AudioClip,
    frame_s: float = DEFAULT_FRAME_S,
    hop_s: float = DEFAULT_HOP_S,
    f0_min: float = DEFAULT_F0_MIN_HZ,
    f0_max: float = DEFAULT_F0_MAX_HZ,
    voicing_threshold: float = DEFAULT_VOICING_THRESHOLD,
    silence_rms_frac: float = DEFAULT_SILENCE_RMS_FRAC,
    pause_min_s: float = DEFAULT_PAUSE_MIN_S,
) -> FeatureVector:
    """The full ``speech.v1`` vector for one pangram recording.

    Requires at least :data:`MIN_CLIP_S` of audio after silence trimming and
    enough voicing to measure jitter/shimmer.
    """
    trimmed = trim_silence(clip, frame_s, hop_s, silence_rms_frac)
    if trimmed.duration_s < MIN_CLIP_S:
        raise ClipTooShort(
            f"need >= {MIN_CLIP_S:.1f} s after trimming, got {trimmed.duration_s:.3f} s"
        )

    pitch = pitch_track(trimmed, f0_min, f0_max, frame_s, hop_s, voicing_threshold)
    voiced_f0 = pitch.f0_hz[pitch.voiced_flags]
    if len(voiced_f0) < 3:
        raise InsufficientVoicing("fewer than 3 voiced frames")
    f0_mean = float(np.mean(voiced_f0))
    f0_std = float(np.std(voiced_f0))
    f0_range = float(np.max(voiced_f0) - np.min(voiced_f0))
    voiced_fraction = float(np.mean(pitch.voiced_flags))
    hnr_proxy = float(np.mean(pitch.peak_strength[pitch.voiced_flags]))

    jitter, shimmer = jitter_shimmer(trimmed, pitch, frame_s, hop_s)

    coeffs = mfcc(trimmed, frame_s=frame_s, hop_s=hop_s)
    mfcc_means = coeffs.mean(axis=0)
    mfcc_stds = coeffs.std(axis=0)

    rate = trimmed.sample_rate_hz
    frame_len = int(round(frame_s * rate))
    hop_len = int(round(hop_s * rate))
    rms = _frame_rms(trimmed.samples, frame_len, hop_len)
    silence_threshold = silence_rms_frac * rms.max()

    # energy-peak rate: local RMS maxima above the floor, >= 100 ms apart
    min_sep = max(1, int(round(0.1 / hop_s)))
    peak_count = 0
    last_peak = -min_sep
    for i in range(1, len(rms) - 1):
        if rms[i] > rms[i - 1] and rms[i] > rms[i + 1] and rms[i] > 2 * silence_threshold:
            if i - last_peak >= min_sep:
                peak_count += 1
                last_peak = i
    energy_peak_rate = peak_count / trimmed.duration_s

    # pauses: interior silent runs at least pause_min_s long
    silent = rms <= silence_threshold
    pause_lengths = []
    run = 0
    for flag in silent:
        if flag:
            run += 1
        else:
            if run * hop_s >= pause_min_s:
                pause_lengths.append(run * hop_s)
            run = 0
    if run * hop_s >= pause_min_s:
        pause_lengths.append(run * hop_s)
    pause_count = float(len(pause_lengths))
    pause_mean = float(np.mean(pause_lengths)) if pause_lengths else 0.0

    values = (
        f0_mean,
        f0_std,
        f0_range,
        voiced_fraction,
        jitter,
        shimmer,
        *(float(v) for v in mfcc_means),
        *(float(v) for v in mfcc_stds),
        energy_peak_rate,
        pause_count,
        pause_mean,
        hnr_proxy,
    )
    return FeatureVector(
        schema_id=SPEECH_SCHEMA_ID, names=SPEECH_FEATURE_NAMES, values=values
    )
