"""Synthetic scenes and taps: deterministic stand-ins for camera and mic.

Used by the service's wire-driven mode (a client sends marker positions,
the scene is rasterized here) and by fixtures and demos.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioChunk
from .raster import Frame, HsvRange

SCENE_BACKGROUND = (25, 26, 30)
DISPLAY_FILL = (200, 200, 205)

# fixture marker palette: a wrapping red band and a mid-green band
RED_MARKER = (220, 40, 40)
RED_RANGE = HsvRange(350.0, 10.0, 0.4, 1.0, 0.3, 1.0)
GREEN_MARKER = (40, 200, 90)
GREEN_RANGE = HsvRange(100.0, 160.0, 0.4, 1.0, 0.3, 1.0)


def solid_frame(width: int, height: int, color=SCENE_BACKGROUND,
                timestamp_ms: float = 0.0) -> Frame:
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:] = color
    return Frame(img, timestamp_ms)


def _pixel_centers(width: int, height: int):
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64) + 0.5,
                         np.arange(height, dtype=np.float64) + 0.5)
    return xs, ys


def draw_disc(frame: Frame, center, radius: float, color) -> Frame:
    xs, ys = _pixel_centers(frame.width, frame.height)
    inside = (xs - center[0]) ** 2 + (ys - center[1]) ** 2 <= radius ** 2
    img = frame.pixels.copy()
    img[inside] = color
    return Frame(img, frame.timestamp_ms)


def draw_ellipse(frame: Frame, center, rx: float, ry: float, color) -> Frame:
    xs, ys = _pixel_centers(frame.width, frame.height)
    inside = ((xs - center[0]) / rx) ** 2 + ((ys - center[1]) / ry) ** 2 <= 1.0
    img = frame.pixels.copy()
    img[inside] = color
    return Frame(img, frame.timestamp_ms)


def draw_polygon(frame: Frame, corners, color) -> Frame:
    """Fill a convex polygon: pixels whose centers fall inside (either winding)."""
    pts = np.asarray(corners, dtype=np.float64)
    xs, ys = _pixel_centers(frame.width, frame.height)
    pos = np.ones(xs.shape, dtype=bool)
    neg = np.ones(xs.shape, dtype=bool)
    for i in range(len(pts)):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % len(pts)]
        cross = (bx - ax) * (ys - ay) - (by - ay) * (xs - ax)
        pos &= cross >= 0
        neg &= cross <= 0
    img = frame.pixels.copy()
    img[pos | neg] = color
    return Frame(img, frame.timestamp_ms)


@dataclass(frozen=True)
class MarkerStyle:
    color: tuple[int, int, int]
    radius: float = 4.0


@dataclass(frozen=True)
class SynthScene:
    """A fixed display object plus movable marker blobs."""

    frame_size: tuple[int, int]                      # (w, h)
    quad: tuple[tuple[float, float], ...]            # TL, BL, BR, TR in frame px
    markers: dict[str, MarkerStyle] = field(default_factory=dict)

    def render(self, positions: dict, timestamp_ms: float = 0.0) -> Frame:
        """Rasterize the scene; positions maps marker id -> (x, y) or None."""
        w, h = self.frame_size
        frame = solid_frame(w, h, SCENE_BACKGROUND, timestamp_ms)
        frame = draw_polygon(frame, self.quad, DISPLAY_FILL)
        for marker_id, style in self.markers.items():
            pos = positions.get(marker_id)
            if pos is not None:
                frame = draw_disc(frame, pos, style.radius, style.color)
        return frame


def default_scene(width: int = 160, height: int = 120) -> SynthScene:
    """The fixture scene: a slightly inset quad, red index and green thumb."""
    quad = ((0.28 * width, 0.18 * height), (0.26 * width, 0.86 * height),
            (0.94 * width, 0.84 * height), (0.92 * width, 0.20 * height))
    return SynthScene(
        frame_size=(width, height),
        quad=quad,
        markers={"index": MarkerStyle(RED_MARKER), "thumb": MarkerStyle(GREEN_MARKER)},
    )


def silence(duration_ms: float, sample_rate: int, start_time_ms: float = 0.0) -> AudioChunk:
    n = int(round(duration_ms * sample_rate / 1000.0))
    return AudioChunk(np.zeros(n), sample_rate, start_time_ms)


def tap_burst(duration_ms: float = 5.0, sample_rate: int = 16000,
              freq: float = 1789.0, amplitude: float = 0.9) -> np.ndarray:
    """A Hann-windowed sine burst near the pass-band center."""
    n = max(int(round(duration_ms * sample_rate / 1000.0)), 1)
    t = np.arange(n) / sample_rate
    window = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(n) / max(n - 1, 1))
    return amplitude * np.sin(2.0 * math.pi * freq * t) * window


def taps_track(tap_times_ms, total_ms: float, sample_rate: int = 16000,
               amplitude: float = 0.9) -> AudioChunk:
    """Silence of total_ms with a burst inserted at each requested time."""
    samples = np.zeros(int(round(total_ms * sample_rate / 1000.0)))
    burst = tap_burst(sample_rate=sample_rate, amplitude=amplitude)
    for t_ms in tap_times_ms:
        start = int(round(t_ms * sample_rate / 1000.0))
        end = min(start + len(burst), len(samples))
        if start < len(samples):
            samples[start:end] += burst[:end - start]
    return AudioChunk(np.clip(samples, -1.0, 1.0), sample_rate, 0.0)
