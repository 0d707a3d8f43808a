"""Session orchestration: frames and audio in, event log and renders out.

The per-tick pipeline (quad -> markers -> taps -> gestures -> document ->
render) lives in PipelineSession.tick so the file-driven runner and the
wire-driven service execute the identical code path.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

from .audio import AudioChunk, BandPassFilter, ClickDetector, ClickEvent, ClickParams, read_wav
from .edges import CannyParams, canny, extract_display_quad, to_gray
from .events import GestureEvent, Placed
from .gestures import GestureParams, GestureState, note_placed, step
from .panel import PrototypeDoc, UnknownElement, apply_gesture, evaluate_graph, load_doc
from .pnm import FrameStream, ppm_bytes
from .raster import Frame, HsvRange
from .tracking import MarkerConfig, MarkerState, assign_clicks_to_frames, fuse_click, track_markers

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SessionConfig:
    doc_path: Path
    markers: tuple[MarkerConfig, ...]
    frame_dir: Path | None = None    # directory source; None means wire-driven
    audio_wav: Path | None = None
    click_params: ClickParams = ClickParams()
    canny_params: CannyParams = CannyParams()
    gesture_params: GestureParams = GestureParams()
    render_resolution: tuple[int, int] = (128, 96)
    asset_root: Path | None = None
    mode_script: tuple[tuple[int, str], ...] = ()   # (tick, mode) switches

    @property
    def primary_marker(self) -> str:
        return self.gesture_params.primary_marker


def load_session_config(path) -> SessionConfig:
    """Parse a session JSON file; relative paths resolve against its directory."""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent

    markers = []
    for m in data["markers"]:
        markers.append(MarkerConfig(
            id=m["id"],
            range=HsvRange(m["hue"][0], m["hue"][1], m["sat"][0], m["sat"][1],
                           m["val"][0], m["val"][1]),
            min_area=int(m.get("min_area", 25)),
        ))

    gesture_kwargs = dict(data.get("gestures", {}))
    if "primary_marker" in data:
        gesture_kwargs["primary_marker"] = data["primary_marker"]
    if "secondary_marker" in data:
        gesture_kwargs["secondary_marker"] = data["secondary_marker"]

    resolution = data.get("render_resolution", [128, 96])
    return SessionConfig(
        doc_path=base / data["doc"],
        markers=tuple(markers),
        frame_dir=base / data["frames"] if "frames" in data else None,
        audio_wav=base / data["audio"] if "audio" in data else None,
        click_params=ClickParams(**data.get("click", {})),
        canny_params=CannyParams(**data.get("canny", {})),
        gesture_params=GestureParams(**gesture_kwargs),
        render_resolution=(int(resolution[0]), int(resolution[1])),
        asset_root=base / data["asset_root"] if "asset_root" in data else base,
        mode_script=tuple((int(e["tick"]), e["mode"]) for e in data.get("mode_script", [])),
    )


@dataclass(frozen=True)
class SessionEventLog:
    records: tuple[dict, ...]

    def to_jsonl(self) -> bytes:
        lines = [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in self.records]
        return ("\n".join(lines) + "\n").encode() if lines else b""

    def write(self, path) -> None:
        Path(path).write_bytes(self.to_jsonl())


@dataclass(frozen=True)
class TickResult:
    tick: int
    record: dict
    events: tuple[GestureEvent, ...]
    doc: PrototypeDoc
    revision: int
    rendered: Frame


def _round6(x: float) -> float:
    return round(float(x), 6)


def _marker_json(s: MarkerState) -> dict:
    return {
        "id": s.id,
        "position": [_round6(s.position[0]), _round6(s.position[1])]
        if s.position is not None else None,
        "velocity": [_round6(s.velocity[0]), _round6(s.velocity[1])],
        "last_seen": s.last_seen,
    }


class AudioIngest:
    """Streaming audio to clicks, for wire-fed sessions one chunk at a time."""

    def __init__(self, params: ClickParams, sample_rate: int):
        self.filter = BandPassFilter(params.f_low, params.f_high, sample_rate)
        self.detector = ClickDetector(params, sample_rate)
        self._drained = 0

    def feed(self, chunk: AudioChunk) -> list[ClickEvent]:
        self.detector.feed(self.filter.process(chunk))
        clicks = self.detector.clicks
        fresh = clicks[self._drained:]
        self._drained = len(clicks)
        return fresh


class PipelineSession:
    """Sequential per-tick engine; one instance tracks one session."""

    def __init__(self, doc: PrototypeDoc, config: SessionConfig):
        self.config = config
        self.doc = doc
        self.gesture = GestureState(mode=doc.mode)
        self.marker_states = [MarkerState(c.id) for c in config.markers]
        self.prev_quad = None
        self.revision = 0
        self.tick_index = -1

    def set_mode(self, mode: str) -> None:
        if mode not in ("edit", "run"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode != self.doc.mode:
            self.doc = replace(self.doc, mode=mode)
            self.revision += 1

    def tick(self, frame: Frame, clicks: list[ClickEvent]) -> TickResult:
        self.tick_index += 1

        edges = canny(to_gray(frame), self.config.canny_params)
        quad = extract_display_quad(edges, self.prev_quad)
        self.prev_quad = quad

        self.marker_states = track_markers(frame, list(self.config.markers),
                                           self.marker_states, self.tick_index)

        tap = None
        if clicks:
            tap = fuse_click(self.marker_states, clicks[0], self.config.primary_marker)
            if len(clicks) > 1:
                log.debug("tick %d: dropped %d extra clicks", self.tick_index, len(clicks) - 1)

        self.gesture, events = step(self.gesture, self.doc, self.marker_states, tap,
                                    quad, (frame.width, frame.height),
                                    self.config.gesture_params)

        doc = self.doc
        effects = []
        for ev in events:
            try:
                doc, just = apply_gesture(doc, ev)
            except UnknownElement as exc:
                log.warning("tick %d: %s targets missing element %s",
                            self.tick_index, ev.kind.value, exc)
                continue
            effects.extend(just)
            for effect in just:
                if isinstance(effect, Placed):
                    self.gesture = note_placed(self.gesture, effect.target)
        doc = evaluate_graph(doc, effects)
        if doc != self.doc:
            self.revision += 1
            self.doc = doc

        rendered = self.render(frame, quad)
        digest = "sha256:" + hashlib.sha256(ppm_bytes(rendered)).hexdigest()

        record = {
            "tick": self.tick_index,
            "timestamp_ms": frame.timestamp_ms,
            "markers": [_marker_json(s) for s in self.marker_states],
            "clicks": [{"time_ms": _round6(c.time_ms), "peak_level": _round6(c.peak_level)}
                       for c in clicks],
            "gestures": [ev.to_json() for ev in events],
            "doc_revision": self.revision,
            "render_digest": digest,
        }
        return TickResult(self.tick_index, record, tuple(events), doc, self.revision, rendered)

    def render(self, frame: Frame, quad) -> Frame:
        from .render import compose_panel, fit_affine, warp_into

        composite = compose_panel(self.doc, self.config.render_resolution,
                                  self.config.asset_root)
        if quad is None:
            return composite
        t = fit_affine((composite.width, composite.height), quad.tl, quad.tr, quad.bl)
        return warp_into(composite, t, frame)


def run_session(config: SessionConfig) -> SessionEventLog:
    """Deterministic file-driven run: every tick logged, sources read once."""
    if config.frame_dir is None:
        raise ValueError("run_session needs a frame directory source")
    doc = load_doc(Path(config.doc_path).read_bytes())
    stream = FrameStream(config.frame_dir)

    clicks: list[ClickEvent] = []
    if config.audio_wav is not None:
        chunk = read_wav(config.audio_wav)
        ingest = AudioIngest(config.click_params, chunk.sample_rate)
        clicks = ingest.feed(chunk)

    by_tick: dict[int, list[ClickEvent]] = {}
    pairs = assign_clicks_to_frames([c.time_ms for c in clicks], stream.timestamps_ms)
    for click_idx, frame_idx in pairs:
        by_tick.setdefault(frame_idx, []).append(clicks[click_idx])

    session = PipelineSession(doc, config)
    switches = dict(config.mode_script)
    records = []
    for i, frame in enumerate(stream):
        if i in switches:
            session.set_mode(switches[i])
        result = session.tick(frame, by_tick.get(i, []))
        records.append(result.record)
    return SessionEventLog(tuple(records))
