"""Band-pass filtering and threshold tap detection on a mono sample stream.

Filter and detector are stateful per-stream sessions: feed chunks of one
stream to one session, in time order. Distinct sessions are independent.
"""
from __future__ import annotations

import math
import wave
from dataclasses import dataclass, field

import numpy as np


class BadParam(ValueError):
    pass


@dataclass(frozen=True)
class AudioChunk:
    samples: np.ndarray      # mono float64 in [-1, 1]
    sample_rate: int
    start_time_ms: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate <= 0:
            raise BadParam("sample_rate must be positive")
        if not np.isfinite(s).all():
            raise BadParam("samples must be finite")
        object.__setattr__(self, "samples", s)

    @property
    def duration_ms(self) -> float:
        return len(self.samples) / self.sample_rate * 1000.0


@dataclass(frozen=True)
class ClickParams:
    """Band edges, RMS threshold, analysis window, and tap debounce."""

    f_low: float = 800.0
    f_high: float = 4000.0
    level_threshold: float = 0.15
    window: int = 256
    debounce_ms: float = 150.0

    def __post_init__(self):
        if self.f_low <= 0 or self.f_high <= self.f_low:
            raise BadParam("need 0 < f_low < f_high")
        if self.window < 1:
            raise BadParam("window must be >= 1")
        if self.debounce_ms < 0:
            raise BadParam("debounce must be >= 0")


@dataclass(frozen=True)
class ClickEvent:
    time_ms: float
    peak_level: float


def bandpass_coefficients(f_low: float, f_high: float, sample_rate: int):
    """Biquad band-pass coefficients via the bilinear transform.

    Center frequency is the geometric mean of the band edges and
    Q = f0 / (f_high - f_low); peak gain at f0 is unity.
    Returns (b, a) with a normalized so a[0] == 1.
    """
    if not (0 < f_low < f_high < sample_rate / 2):
        raise BadParam(f"band [{f_low}, {f_high}] invalid for rate {sample_rate}")
    f0 = math.sqrt(f_low * f_high)
    q = f0 / (f_high - f_low)
    w0 = 2.0 * math.pi * f0 / sample_rate
    alpha = math.sin(w0) / (2.0 * q)
    a0 = 1.0 + alpha
    b = np.array([alpha, 0.0, -alpha]) / a0
    a = np.array([1.0, -2.0 * math.cos(w0) / a0, (1.0 - alpha) / a0])
    return b, a


class BandPassFilter:
    """Second-order IIR band-pass; state carries across chunks of one stream."""

    def __init__(self, f_low: float, f_high: float, sample_rate: int):
        self.sample_rate = sample_rate
        self.b, self.a = bandpass_coefficients(f_low, f_high, sample_rate)
        self._z1 = 0.0
        self._z2 = 0.0

    def process(self, chunk: AudioChunk) -> AudioChunk:
        if chunk.sample_rate != self.sample_rate:
            raise BadParam("chunk sample rate does not match the filter")
        b0, b1, b2 = self.b
        a1, a2 = self.a[1], self.a[2]
        z1, z2 = self._z1, self._z2
        x = chunk.samples
        y = np.empty_like(x)
        # transposed direct form II, one sample at a time so chunk joins are exact
        for i in range(len(x)):
            xi = x[i]
            yi = b0 * xi + z1
            z1 = b1 * xi - a1 * yi + z2
            z2 = b2 * xi - a2 * yi
            y[i] = yi
        self._z1, self._z2 = z1, z2
        return AudioChunk(y, chunk.sample_rate, chunk.start_time_ms)


def band_pass(chunk: AudioChunk, f_low: float, f_high: float) -> AudioChunk:
    """One-shot filtering of a single chunk with fresh state."""
    return BandPassFilter(f_low, f_high, chunk.sample_rate).process(chunk)


class ClickDetector:
    """Windowed RMS threshold detector with debounce, fed filtered chunks.

    A click fires at the first window whose RMS reaches the threshold;
    above-threshold windows starting within the debounce interval of the
    click are absorbed into it (peak_level tracks the run maximum). Trailing
    samples shorter than one window are held until more arrive.
    """

    def __init__(self, params: ClickParams, sample_rate: int):
        if params.f_high >= sample_rate / 2:
            raise BadParam("f_high must be below the Nyquist frequency")
        self.params = params
        self.sample_rate = sample_rate
        self._carry = np.empty(0, dtype=np.float64)
        self._carry_time_ms = 0.0
        self._clicks: list[ClickEvent] = []
        self._open: ClickEvent | None = None

    def feed(self, chunk: AudioChunk) -> None:
        if len(self._carry) == 0:
            self._carry_time_ms = chunk.start_time_ms
        buf = np.concatenate([self._carry, chunk.samples])
        win = self.params.window
        n_windows = len(buf) // win
        ms_per_sample = 1000.0 / self.sample_rate
        for k in range(n_windows):
            seg = buf[k * win:(k + 1) * win]
            rms = float(np.sqrt(np.mean(seg * seg)))
            t = self._carry_time_ms + k * win * ms_per_sample
            self._observe(t, rms)
        used = n_windows * win
        self._carry = buf[used:]
        self._carry_time_ms += used * ms_per_sample

    def _observe(self, t_ms: float, rms: float) -> None:
        if rms < self.params.level_threshold:
            return
        if self._open is not None and t_ms - self._open.time_ms <= self.params.debounce_ms:
            if rms > self._open.peak_level:
                self._open = ClickEvent(self._open.time_ms, rms)
                self._clicks[-1] = self._open
            return
        self._open = ClickEvent(t_ms, rms)
        self._clicks.append(self._open)

    @property
    def clicks(self) -> list[ClickEvent]:
        return list(self._clicks)


def detect_clicks(chunks, params: ClickParams, sample_rate: int) -> list[ClickEvent]:
    """Run the detector over an iterable of already-filtered chunks."""
    det = ClickDetector(params, sample_rate)
    for chunk in chunks:
        det.feed(chunk)
    return det.clicks


def read_wav(path) -> AudioChunk:
    """Read a 16-bit PCM mono WAV file into a float chunk."""
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1:
            raise BadParam(f"{path}: expected mono, got {wf.getnchannels()} channels")
        if wf.getsampwidth() != 2:
            raise BadParam(f"{path}: expected 16-bit samples")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return AudioChunk(samples, rate, 0.0)


def write_wav(chunk: AudioChunk, path) -> None:
    clipped = np.clip(chunk.samples, -1.0, 1.0)
    data = (clipped * 32767.0).round().astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(chunk.sample_rate)
        wf.writeframes(data.tobytes())
