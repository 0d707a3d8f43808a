"""Per-frame marker fusion: locate color markers, smooth positions, fuse taps.

Frames must be fed in timestamp order; a session tracks one camera stream.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .audio import ClickEvent
from .raster import Frame, HsvRange, connected_components, min_area_rect, segment

SMOOTHING_ALPHA = 0.5


@dataclass(frozen=True)
class MarkerConfig:
    id: str
    range: HsvRange
    min_area: int = 25


@dataclass(frozen=True)
class MarkerState:
    id: str
    position: tuple[float, float] | None = None
    velocity: tuple[float, float] = (0.0, 0.0)
    last_seen: int = -1


@dataclass(frozen=True)
class TapEvent:
    time_ms: float
    position: tuple[float, float]
    marker_id: str


def _locate(frame: Frame, config: MarkerConfig) -> tuple[float, float] | None:
    mask = segment(frame, config.range)
    components = connected_components(mask)
    if not components or components[0].area < config.min_area:
        return None
    rect = min_area_rect(components[0].pixel_centers())
    return rect.center


def track_markers(frame: Frame, configs: list[MarkerConfig],
                  prev: list[MarkerState], frame_index: int = 0) -> list[MarkerState]:
    """Locate each configured marker and advance its smoothed state.

    Position is the min-area-rect center of the largest in-range component
    (absent when none reaches min_area). Reported positions are exponentially
    smoothed; velocity is the per-frame delta of reported positions. A marker
    reappearing after absence restarts from the raw measurement.
    """
    if not configs:
        raise ValueError("configs must be nonempty")
    ids = [c.id for c in configs]
    if len(set(ids)) != len(ids):
        raise ValueError("marker ids must be unique")
    prev_by_id = {s.id: s for s in prev}
    out = []
    for config in configs:
        before = prev_by_id.get(config.id, MarkerState(config.id))
        raw = _locate(frame, config)
        if raw is None:
            out.append(replace(before, position=None, velocity=(0.0, 0.0)))
            continue
        if before.position is not None and before.last_seen == frame_index - 1:
            a = SMOOTHING_ALPHA
            pos = (a * raw[0] + (1 - a) * before.position[0],
                   a * raw[1] + (1 - a) * before.position[1])
            vel = (pos[0] - before.position[0], pos[1] - before.position[1])
        else:
            pos = raw
            vel = (0.0, 0.0)
        out.append(MarkerState(config.id, pos, vel, frame_index))
    return out


def fuse_click(states: list[MarkerState], click: ClickEvent,
               primary_marker: str) -> TapEvent | None:
    """Position a click at the primary marker, or drop it when unseen.

    The caller picks the frame nearest the click time; `states` are that
    frame's marker states.
    """
    for state in states:
        if state.id == primary_marker:
            if state.position is None:
                return None
            return TapEvent(click.time_ms, state.position, state.id)
    return None


def assign_clicks_to_frames(click_times_ms, frame_times_ms) -> list[tuple[int, int]]:
    """Map each click to the nearest frame: (click index, frame index) pairs.

    Ties between two equidistant frames go to the earlier frame. Clicks
    farther than one typical frame interval from every frame are dropped.
    """
    clicks = np.asarray(click_times_ms, dtype=np.float64)
    frames = np.asarray(frame_times_ms, dtype=np.float64)
    if len(frames) == 0:
        return []
    if len(frames) > 1:
        tolerance = float(np.median(np.diff(frames)))
    else:
        tolerance = np.inf
    pairs = []
    for ci, t in enumerate(clicks):
        right = int(np.searchsorted(frames, t))
        candidates = [i for i in (right - 1, right) if 0 <= i < len(frames)]
        # earlier frame first, so it wins exact-distance ties
        best = min(candidates, key=lambda i: (abs(frames[i] - t), i))
        if abs(frames[best] - t) <= tolerance:
            pairs.append((ci, best))
    return pairs


class MarkerTracker:
    """Stateful per-session wrapper counting frames for track_markers."""

    def __init__(self, configs: list[MarkerConfig]):
        self.configs = configs
        self.states: list[MarkerState] = [MarkerState(c.id) for c in configs]
        self.frame_index = -1

    def update(self, frame: Frame) -> list[MarkerState]:
        self.frame_index += 1
        self.states = track_markers(frame, self.configs, self.states, self.frame_index)
        return self.states
