"""Band-pass filtering and tap detection against the transfer-function oracle."""
from __future__ import annotations

import math

import numpy as np
import pytest

from vip.audio import (AudioChunk, BadParam, BandPassFilter, ClickDetector,
                       ClickParams, band_pass, bandpass_coefficients,
                       detect_clicks, read_wav, write_wav)
from vip.synth import tap_burst, taps_track

from _oracles import biquad_gain_oracle


def _sine(freq: float, duration_s: float, fs: int, amplitude: float = 1.0) -> np.ndarray:
    t = np.arange(int(duration_s * fs)) / fs
    return amplitude * np.sin(2.0 * math.pi * freq * t)


def _steady_amplitude(samples: np.ndarray) -> float:
    tail = samples[int(len(samples) * 0.8):]
    return float(np.sqrt(np.mean(tail ** 2)) * math.sqrt(2.0))


# -------------------------------------------------------------------- filter

def test_coefficients_reject_bad_bands():
    with pytest.raises(BadParam):
        bandpass_coefficients(0.0, 4000.0, 16000)
    with pytest.raises(BadParam):
        bandpass_coefficients(4000.0, 800.0, 16000)
    with pytest.raises(BadParam):
        bandpass_coefficients(800.0, 9000.0, 16000)  # above Nyquist


def test_dc_input_converges_to_zero():
    out = band_pass(AudioChunk(np.full(16000, 0.8), 16000), 800.0, 4000.0)
    assert np.abs(out.samples[8000:]).max() < 0.01


def test_center_frequency_gain_near_unity():
    fs = 16000
    f0 = math.sqrt(800.0 * 3200.0)  # 1600 Hz
    out = band_pass(AudioChunk(_sine(f0, 1.0, fs), fs), 800.0, 3200.0)
    amp = _steady_amplitude(out.samples)
    assert 0.9 <= amp <= 1.1
    b, a = bandpass_coefficients(800.0, 3200.0, fs)
    assert amp == pytest.approx(biquad_gain_oracle(b, a, f0, fs), rel=0.05)


def test_far_stop_band_attenuation():
    # 8 * f_high = 25.6 kHz needs headroom above Nyquist, so this runs at 64 kHz
    fs = 64000
    freq = 8 * 3200.0
    out = band_pass(AudioChunk(_sine(freq, 1.0, fs), fs), 800.0, 3200.0)
    amp = _steady_amplitude(out.samples)
    assert amp < 0.1
    b, a = bandpass_coefficients(800.0, 3200.0, fs)
    assert amp == pytest.approx(biquad_gain_oracle(b, a, freq, fs), rel=0.05)


def test_measured_response_tracks_oracle_across_band(rng):
    fs = 16000
    b, a = bandpass_coefficients(800.0, 4000.0, fs)
    for freq in (200.0, 800.0, 1789.0, 4000.0, 7000.0):
        out = band_pass(AudioChunk(_sine(freq, 1.0, fs), fs), 800.0, 4000.0)
        assert _steady_amplitude(out.samples) == pytest.approx(
            biquad_gain_oracle(b, a, freq, fs), rel=0.05, abs=1e-4)


def test_filter_linearity(rng):
    x = rng.standard_normal(4096) * 0.2
    fs = 16000
    y1 = BandPassFilter(800.0, 4000.0, fs).process(AudioChunk(x, fs)).samples
    y2 = BandPassFilter(800.0, 4000.0, fs).process(AudioChunk(3.5 * x, fs)).samples
    assert np.abs(3.5 * y1 - y2).max() < 1e-9


def test_chunking_invariance(rng):
    x = rng.standard_normal(10000) * 0.5
    fs = 16000
    whole = BandPassFilter(800.0, 4000.0, fs).process(AudioChunk(x, fs)).samples

    f = BandPassFilter(800.0, 4000.0, fs)
    cuts = sorted(rng.integers(1, len(x) - 1, size=7).tolist())
    parts = []
    prev = 0
    for cut in cuts + [len(x)]:
        if cut > prev:
            parts.append(f.process(AudioChunk(x[prev:cut], fs,
                                              prev * 1000.0 / fs)).samples)
            prev = cut
    assert np.abs(np.concatenate(parts) - whole).max() < 1e-12


# ------------------------------------------------------------------ detector

def test_silence_has_no_clicks():
    params = ClickParams(level_threshold=0.2)
    chunk = AudioChunk(np.zeros(16000), 16000)
    assert detect_clicks([chunk], params, 16000) == []


def test_single_burst_clicks_once_at_window_start():
    fs = 16000
    track = taps_track([165.0], total_ms=500.0, sample_rate=fs)
    clicks = detect_clicks([track], ClickParams(level_threshold=0.2), fs)
    assert len(clicks) == 1
    # window 256 samples = 16 ms; the 165 ms burst lands in the window at 160 ms
    assert clicks[0].time_ms == pytest.approx(160.0)
    assert clicks[0].peak_level >= 0.2


def test_two_bursts_within_debounce_merge():
    fs = 16000
    track = taps_track([100.0, 130.0], total_ms=500.0, sample_rate=fs)
    clicks = detect_clicks([track], ClickParams(level_threshold=0.2, debounce_ms=100.0), fs)
    assert len(clicks) == 1


def test_two_bursts_beyond_debounce_stay_separate():
    fs = 16000
    track = taps_track([100.0, 300.0], total_ms=600.0, sample_rate=fs)
    clicks = detect_clicks([track], ClickParams(level_threshold=0.2, debounce_ms=100.0), fs)
    assert len(clicks) == 2
    assert clicks[0].time_ms < clicks[1].time_ms


def test_debounce_anchors_to_first_window():
    # a long rumble: windows stay loud past the debounce horizon; clicks
    # re-fire anchored to the first crossing, not to the last loud window
    fs = 16000
    samples = _sine(1000.0, 0.2, fs, amplitude=0.8)
    clicks = detect_clicks([AudioChunk(samples, fs)],
                           ClickParams(level_threshold=0.2, debounce_ms=50.0), fs)
    assert len(clicks) >= 2
    gaps = np.diff([c.time_ms for c in clicks])
    assert (gaps > 50.0).all()


def test_click_peak_never_below_threshold(rng):
    fs = 16000
    for _ in range(10):
        x = rng.standard_normal(8000) * rng.uniform(0.05, 0.4)
        params = ClickParams(level_threshold=0.15)
        for c in detect_clicks([AudioChunk(x, fs)], params, fs):
            assert c.peak_level >= params.level_threshold


def test_click_count_monotone_in_threshold(rng):
    fs = 16000
    for _ in range(20):
        x = rng.standard_normal(12000) * rng.uniform(0.05, 0.5)
        chunk = AudioChunk(x, fs)
        counts = [len(detect_clicks([chunk], ClickParams(level_threshold=t), fs))
                  for t in (0.05, 0.1, 0.2, 0.4)]
        assert counts == sorted(counts, reverse=True)


def test_detector_streaming_equals_one_shot(rng):
    fs = 16000
    x = np.concatenate([taps_track([50.0, 400.0], 600.0, fs).samples,
                        rng.standard_normal(3000) * 0.05])
    params = ClickParams(level_threshold=0.2)
    whole = detect_clicks([AudioChunk(x, fs)], params, fs)

    det = ClickDetector(params, fs)
    prev = 0
    for cut in (1000, 1100, 5000, 9000, len(x)):
        det.feed(AudioChunk(x[prev:cut], fs, prev * 1000.0 / fs))
        prev = cut
    assert [(c.time_ms, c.peak_level) for c in det.clicks] == \
        [(c.time_ms, c.peak_level) for c in whole]


def test_chunk_requires_finite_samples():
    with pytest.raises(ValueError):
        AudioChunk(np.array([0.0, np.nan]), 16000)


# ----------------------------------------------------------------------- wav

def test_wav_round_trip(tmp_path, rng):
    fs = 16000
    x = np.clip(rng.standard_normal(2048) * 0.3, -1.0, 1.0)
    path = tmp_path / "clip.wav"
    write_wav(AudioChunk(x, fs), path)
    back = read_wav(path)
    assert back.sample_rate == fs
    assert len(back.samples) == len(x)
    # write scales by 32767, read divides by 32768: error <= (0.5 + |x|)/32768
    assert np.abs(back.samples - x).max() <= (0.5 + np.abs(x).max()) / 32768 + 1e-12


def test_burst_passes_band_near_unity():
    fs = 16000
    burst = tap_burst(sample_rate=fs)
    b, a = bandpass_coefficients(800.0, 4000.0, fs)
    # the fixture burst sits at the default band's center frequency
    assert biquad_gain_oracle(b, a, 1789.0, fs) == pytest.approx(1.0, abs=1e-3)
    assert len(burst) == 80  # 5 ms at 16 kHz
