import numpy as np
import pytest

from helpers import cyclic_clip, naive_dft_power, sine_clip

from pdscreen.ingest import AudioClip
from pdscreen.speech import (
    ClipTooShort,
    InsufficientVoicing,
    extract_speech_features,
    frame_signal,
    jitter_shimmer,
    mel_energies,
    mel_filterbank,
    mfcc,
    pitch_track,
    trim_silence,
)


class TestFrameSignal:
    def test_frame_count_formula(self):
        clip = AudioClip(samples=np.zeros(16000), sample_rate_hz=16000)
        frames = frame_signal(clip, 0.025, 0.010)
        # floor((16000 - 400) / 160) + 1
        assert frames.shape == (98, 400)

    def test_clip_too_short(self):
        clip = AudioClip(samples=np.zeros(100), sample_rate_hz=16000)
        with pytest.raises(ClipTooShort):
            frame_signal(clip, 0.025, 0.010)

    def test_single_frame_when_frame_is_clip(self):
        clip = AudioClip(samples=np.zeros(800), sample_rate_hz=16000)
        frames = frame_signal(clip, 0.05, 0.05)
        assert frames.shape[0] == 1

    def test_hann_window_applied(self):
        clip = AudioClip(samples=np.ones(400), sample_rate_hz=16000)
        frames = frame_signal(clip, 0.025, 0.010)
        assert np.allclose(frames[0], np.hanning(400))


class TestPitchTrack:
    @pytest.mark.parametrize("f0,tol", [(100, 1.0), (220, 2.0), (330, 2.0)])
    def test_pure_tone_frequency(self, f0, tol):
        pt = pitch_track(sine_clip(f0, duration_s=1.0))
        voiced = pt.f0_hz[pt.voiced_flags]
        assert pt.voiced_flags.mean() > 0.95
        assert np.all(np.abs(voiced - f0) <= tol)

    def test_digital_silence_unvoiced(self):
        clip = AudioClip(samples=np.zeros(16000), sample_rate_hz=16000)
        pt = pitch_track(clip)
        assert not pt.voiced_flags.any()
        assert np.all(pt.f0_hz == 0.0)

    def test_white_noise_mostly_unvoiced(self):
        rng = np.random.default_rng(1)
        clip = AudioClip(samples=0.5 * rng.normal(size=16000), sample_rate_hz=16000)
        pt = pitch_track(clip)
        assert pt.voiced_flags.mean() < 0.2

    def test_f0_bounds_respected(self):
        pt = pitch_track(sine_clip(220))
        voiced = pt.f0_hz[pt.voiced_flags]
        assert np.all((voiced >= 75.0) & (voiced <= 500.0))

    def test_invalid_range_rejected(self):
        with pytest.raises(ValueError):
            pitch_track(sine_clip(220), f0_min=500, f0_max=75)


class TestJitterShimmer:
    def test_clean_tone_near_zero(self):
        clip = sine_clip(150, duration_s=2.0)
        jitter, shimmer = jitter_shimmer(clip, pitch_track(clip))
        assert jitter < 1e-3
        assert shimmer < 1e-3

    def test_alternating_periods_closed_form(self):
        # periods alternate T and 1.02T: jitter = 0.02T / 1.01T
        clip = cyclic_clip(150, [1.0, 1.02], [0.7])
        jitter, _ = jitter_shimmer(clip, pitch_track(clip))
        expected = 0.02 / 1.01
        assert jitter == pytest.approx(expected, rel=0.10)

    def test_alternating_amplitude_closed_form(self):
        # amplitudes alternate A and 0.9A: shimmer = 0.1A / 0.95A
        clip = cyclic_clip(150, [1.0], [0.7, 0.63])
        _, shimmer = jitter_shimmer(clip, pitch_track(clip))
        expected = 0.1 / 0.95
        assert shimmer == pytest.approx(expected, rel=0.10)

    def test_insufficient_voicing(self):
        clip = AudioClip(samples=np.zeros(16000), sample_rate_hz=16000)
        pt = pitch_track(clip)
        with pytest.raises(InsufficientVoicing):
            jitter_shimmer(clip, pt)


class TestMfcc:
    def test_output_shape(self):
        coeffs = mfcc(sine_clip(220), n_mels=26, n_coeffs=13)
        assert coeffs.shape[1] == 13

    def test_filterbank_energies_match_naive_dft(self):
        clip = sine_clip(440)
        frames = frame_signal(clip)
        frame_idx = 10
        oracle_power = naive_dft_power(frames[frame_idx])
        fb = mel_filterbank(26, len(oracle_power), clip.sample_rate_hz, frames.shape[1])
        oracle = oracle_power @ fb.T
        mine = mel_energies(clip)[frame_idx]
        rel = np.abs(mine - oracle) / np.abs(oracle)
        assert rel.max() < 1e-6

    def test_scaling_shifts_log_energies_and_only_c0(self):
        rng = np.random.default_rng(3)
        t = np.arange(16000) / 16000
        base = 0.4 * np.sin(2 * np.pi * 440 * t) + 0.05 * rng.normal(size=16000)
        clip = AudioClip(samples=base, sample_rate_hz=16000)
        half = AudioClip(samples=0.5 * base, sample_rate_hz=16000)

        log_e = np.log(mel_energies(clip))
        log_e_half = np.log(mel_energies(half))
        assert np.allclose(log_e_half - log_e, np.log(0.25), atol=1e-9)

        c = mfcc(clip)
        c_half = mfcc(half)
        assert not np.allclose(c[:, 0], c_half[:, 0])
        assert np.allclose(c[:, 1:], c_half[:, 1:], atol=1e-9)

    @pytest.mark.parametrize("rate", [8000, 16000, 44100, 48000])
    def test_filterbank_rows_cover_spectrum(self, rate):
        frame_len = int(round(0.025 * rate))
        fb = mel_filterbank(26, frame_len // 2 + 1, rate, frame_len)
        sums = fb.sum(axis=1)
        assert np.all(sums > 0)


class TestTrimSilence:
    def test_trims_leading_and_trailing(self):
        rate = 16000
        tone = 0.7 * np.sin(2 * np.pi * 220 * np.arange(rate) / rate)
        padded = np.concatenate([np.zeros(rate // 2), tone, np.zeros(rate // 2)])
        clip = AudioClip(samples=padded, sample_rate_hz=rate)
        trimmed = trim_silence(clip)
        assert abs(trimmed.duration_s - 1.0) < 0.06

    def test_all_silence_raises(self):
        clip = AudioClip(samples=np.zeros(16000), sample_rate_hz=16000)
        with pytest.raises(ClipTooShort):
            trim_silence(clip)


class TestExtractSpeechFeatures:
    def test_pure_tone_voiced_no_pauses(self):
        fv = extract_speech_features(sine_clip(220, duration_s=2.0))
        d = dict(zip(fv.names, fv.values))
        assert d["voiced_fraction"] > 0.9
        assert d["pause_count"] == 0.0
        assert abs(d["f0_mean_hz"] - 220) < 2.0

    def test_pause_detection(self):
        rate = 16000
        tone = 0.7 * np.sin(2 * np.pi * 220 * np.arange(rate) / rate)
        x = np.concatenate([tone, np.zeros(rate // 2), tone])
        fv = extract_speech_features(AudioClip(samples=x, sample_rate_hz=rate))
        d = dict(zip(fv.names, fv.values))
        assert d["pause_count"] == 1.0
        assert d["pause_mean_s"] == pytest.approx(0.5, abs=0.03)

    def test_schema_stable_across_clips(self):
        fv1 = extract_speech_features(sine_clip(150, duration_s=1.5))
        fv2 = extract_speech_features(sine_clip(300, duration_s=2.5))
        assert fv1.names == fv2.names
        assert fv1.schema_id == fv2.schema_id == "speech.v1"
        assert len(fv1.values) == 36

    def test_too_short_after_trim(self):
        with pytest.raises(ClipTooShort):
            extract_speech_features(sine_clip(220, duration_s=0.5))

    def test_unvoiced_noise_raises(self):
        rng = np.random.default_rng(0)
        clip = AudioClip(samples=0.5 * rng.normal(size=32000), sample_rate_hz=16000)
        with pytest.raises(InsufficientVoicing):
            extract_speech_features(clip)

    @pytest.mark.parametrize("scale", [1.0, 0.5, 0.1, 0.01])
    def test_amplitude_invariance(self, scale):
        base = cyclic_clip(180, [1.0, 1.01], [0.7, 0.66], duration_s=2.0)
        ref = extract_speech_features(base)
        scaled = AudioClip(samples=base.samples * scale, sample_rate_hz=16000)
        out = extract_speech_features(scaled)
        d_ref = dict(zip(ref.names, ref.values))
        d_out = dict(zip(out.names, out.values))
        for key in (
            "f0_mean_hz",
            "f0_std_hz",
            "f0_range_hz",
            "voiced_fraction",
            "jitter_local",
            "shimmer_local",
        ):
            assert d_out[key] == pytest.approx(d_ref[key], rel=1e-6, abs=1e-9), key

    def test_deterministic(self):
        clip = cyclic_clip(160, [1.0, 1.015], [0.7, 0.68], duration_s=1.8)
        fv1 = extract_speech_features(clip)
        fv2 = extract_speech_features(clip)
        assert fv1 == fv2
