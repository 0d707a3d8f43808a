"""Deterministic gesture recognition over marker, tap, and quad streams.

step() is a pure transition function: identical input sequences replay to
identical event sequences. One state instance tracks one session.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .edges import DisplayQuad
from .events import SURFACE, GestureEvent, GestureKind
from .panel import ElementKind, PanelElement, PrototypeDoc
from .tracking import MarkerState, TapEvent

log = logging.getLogger(__name__)

# palette strip geometry along the left frame edge, as frame fractions
PALETTE_X0 = 0.01
PALETTE_X1 = 0.14
PALETTE_Y0 = 0.02
PALETTE_STEP = 0.12
PALETTE_ENTRY_H = 0.10


class DegenerateQuad(ValueError):
    pass


@dataclass(frozen=True)
class GestureParams:
    primary_marker: str = "index"
    secondary_marker: str = "thumb"
    wipe_corner: float = 0.15    # corner square size, panel fraction
    wipe_rise: float = 0.40      # required vertical travel, panel fraction
    wipe_frames: int = 15        # trace ring length
    pinch_inflate: float = 0.10  # bounds inflation when capturing a pinch
    motion_eps: float = 1e-6     # px below which a marker counts as still


@dataclass(frozen=True)
class GestureState:
    mode: str = "edit"
    clipboard: str | None = None
    drag: tuple[str, tuple[float, float]] | None = None  # (element, grab offset uv)
    pinch: tuple[float, str] | None = None               # (start distance px, element)
    wipe_trace: tuple[tuple[float, float], ...] = ()
    focus: str | None = None     # most recently placed / grabbed / pinched element
    pinch_armed: bool = True     # blocks instant pinch restart after one ends
    last_primary: tuple[float, float] | None = None      # frame px


def _cross(p, q) -> float:
    return float(p[0] * q[1] - p[1] * q[0])


def to_panel_coords(frame_pos, quad: DisplayQuad) -> tuple[float, float]:
    """Invert the bilinear map of the quad: frame point -> (u,v) unit square.

    Points outside the quad come back outside [0,1]^2, not clamped. Of the
    two quadratic roots the one nearer the unit square wins.
    """
    a, b, c, d = quad.tl, quad.tr, quad.br, quad.bl
    e = b - a
    f = d - a
    g = a - b + c - d
    h = np.asarray(frame_pos, dtype=np.float64) - a

    scale = abs(_cross(e, f))
    if scale < 1e-9:
        raise DegenerateQuad("quad edges are collinear")

    k2 = _cross(g, f)
    k1 = _cross(e, f) + _cross(h, g)
    k0 = _cross(h, e)

    if abs(k2) < 1e-12 * scale:
        if abs(k1) < 1e-12 * scale:
            raise DegenerateQuad("bilinear system is singular")
        candidates = [-k0 / k1]
    else:
        disc = k1 * k1 - 4.0 * k0 * k2
        disc = max(disc, 0.0)  # beyond the fold line: take the nearest preimage
        root = math.sqrt(disc)
        candidates = [(-k1 - root) / (2.0 * k2), (-k1 + root) / (2.0 * k2)]

    def solve_u(v: float) -> float:
        dx = e[0] + g[0] * v
        dy = e[1] + g[1] * v
        if max(abs(dx), abs(dy)) < 1e-12:
            raise DegenerateQuad("bilinear system is singular")
        if abs(dx) >= abs(dy):
            return (h[0] - f[0] * v) / dx
        return (h[1] - f[1] * v) / dy

    def outsideness(uv) -> float:
        u, v = uv
        return (max(0.0, -u) + max(0.0, u - 1.0)
                + max(0.0, -v) + max(0.0, v - 1.0))

    pairs = [(solve_u(v), v) for v in candidates]
    u, v = min(pairs, key=outsideness)
    return (float(u), float(v))


def panel_to_frame(uv, quad: DisplayQuad) -> tuple[float, float]:
    """Forward bilinear map: (u,v) in the unit square -> frame point."""
    a, b, c, d = quad.tl, quad.tr, quad.br, quad.bl
    u, v = uv
    p = a + u * (b - a) + v * (d - a) + u * v * (a - b + c - d)
    return (float(p[0]), float(p[1]))


def palette_layout(frame_size, count: int) -> list[tuple[float, float, float, float]]:
    """Pixel rectangles (x0, y0, x1, y1) for palette entries, top to bottom."""
    w, h = frame_size
    out = []
    for i in range(count):
        y0 = (PALETTE_Y0 + PALETTE_STEP * i) * h
        out.append((PALETTE_X0 * w, y0, PALETTE_X1 * w, y0 + PALETTE_ENTRY_H * h))
    return out


def palette_hit(frame_size, count: int, pos) -> int | None:
    for i, (x0, y0, x1, y1) in enumerate(palette_layout(frame_size, count)):
        if x0 <= pos[0] <= x1 and y0 <= pos[1] <= y1:
            return i
    return None


def hit_element(doc: PrototypeDoc, uv, inflate: float = 0.0) -> PanelElement | None:
    """Topmost element under the point; z ties go to the later list entry."""
    best = None
    best_key = None
    for i, el in enumerate(doc.elements):
        if el.contains(uv, inflate):
            key = (el.z, i)
            if best_key is None or key > best_key:
                best, best_key = el, key
    return best


def _pinch_target(doc: PrototypeDoc, uv1, uv2, inflate: float) -> PanelElement | None:
    best = None
    best_key = None
    for i, el in enumerate(doc.elements):
        if el.locked:
            continue
        if el.contains(uv1, inflate) and el.contains(uv2, inflate):
            key = (el.z, i)
            if best_key is None or key > best_key:
                best, best_key = el, key
    return best


def _in_corner(uv, corner: float) -> bool:
    return uv[0] <= corner and uv[1] >= 1.0 - corner


def _check_wipe(trace, params: GestureParams) -> GestureKind | None:
    n = len(trace)
    if n < 2:
        return None
    for i in range(n - 1):
        if not _in_corner(trace[i], params.wipe_corner):
            continue
        vs = [p[1] for p in trace[i:]]
        if all(later <= earlier + 1e-9 for earlier, later in zip(vs, vs[1:])) \
                and vs[0] - vs[-1] >= params.wipe_rise:
            return GestureKind.WIPE_OPEN
    if _in_corner(trace[-1], params.wipe_corner):
        for i in range(n - 1):
            vs = [p[1] for p in trace[i:]]
            if all(later >= earlier - 1e-9 for earlier, later in zip(vs, vs[1:])) \
                    and vs[-1] - vs[0] >= params.wipe_rise:
                return GestureKind.WIPE_CLOSE
    return None


def note_placed(state: GestureState, elem_id: str) -> GestureState:
    """Record the element just created by a Place, so Lock can target it."""
    return replace(state, focus=elem_id)


_DEFAULT_PARAMS = GestureParams()


def step(state: GestureState, doc: PrototypeDoc, markers: list[MarkerState],
         tap: TapEvent | None, quad: DisplayQuad | None, frame_size,
         params: GestureParams = _DEFAULT_PARAMS) -> tuple[GestureState, list[GestureEvent]]:
    """Advance the machine by one frame tick.

    Routing order: mode sync, pinch lifecycle, tap routing, drag motion,
    wipe trace, scan. An active pinch consumes the tick's tap; a tap while
    dragging always ends the drag, wherever it lands.
    """
    events: list[GestureEvent] = []

    if state.mode != doc.mode:
        state = replace(state, mode=doc.mode, clipboard=None, drag=None,
                        pinch=None, wipe_trace=(), pinch_armed=True)

    by_id = {m.id: m for m in markers}
    primary = by_id.get(params.primary_marker)
    secondary = by_id.get(params.secondary_marker)
    primary_pos = primary.position if primary is not None else None

    if quad is None:
        if tap is not None:
            log.debug("tap at %s dropped: no display quad", tap.position)
        return replace(state, last_primary=primary_pos, wipe_trace=()), events

    try:
        primary_uv = to_panel_coords(primary_pos, quad) if primary_pos is not None else None
    except DegenerateQuad:
        log.debug("degenerate quad; tick skipped")
        return replace(state, last_primary=primary_pos, wipe_trace=()), events

    both = (primary_pos is not None
            and secondary is not None and secondary.position is not None)

    # --- pinch lifecycle -----------------------------------------------------
    if state.pinch is not None:
        start_dist, target = state.pinch
        if not both:
            events.append(GestureEvent(GestureKind.RESIZE_END, target))
            state = replace(state, pinch=None, pinch_armed=False)
        else:
            p1 = np.asarray(primary_pos, dtype=np.float64)
            p2 = np.asarray(secondary.position, dtype=np.float64)
            mid_uv = to_panel_coords((p1 + p2) / 2.0, quad)
            scale = float(np.hypot(*(p1 - p2))) / start_dist
            if scale > 1.0:
                events.append(GestureEvent(GestureKind.RESIZE_END, target, mid_uv))
                state = replace(state, pinch=None, pinch_armed=False)
            else:
                events.append(GestureEvent(GestureKind.RESIZE_MOVE, target, mid_uv, scale=scale))
    else:
        target_el = None
        if both:
            p1 = np.asarray(primary_pos, dtype=np.float64)
            p2 = np.asarray(secondary.position, dtype=np.float64)
            uv1 = to_panel_coords(p1, quad)
            uv2 = to_panel_coords(p2, quad)
            target_el = _pinch_target(doc, uv1, uv2, params.pinch_inflate)
        if target_el is None:
            if not state.pinch_armed:
                state = replace(state, pinch_armed=True)
        elif state.pinch_armed and state.drag is None and state.mode == "edit":
            dist = float(np.hypot(*(p1 - p2)))
            if dist > params.motion_eps:
                mid_uv = to_panel_coords((p1 + p2) / 2.0, quad)
                state = replace(state, pinch=(dist, target_el.id), focus=target_el.id)
                events.append(GestureEvent(GestureKind.RESIZE_START, target_el.id,
                                           mid_uv, scale=1.0))

    # --- tap routing ----------------------------------------------------------
    if tap is not None and state.pinch is not None:
        log.debug("tap at %s dropped: pinch active", tap.position)
    elif tap is not None:
        tap_uv = to_panel_coords(tap.position, quad)
        if state.drag is not None:
            target, _ = state.drag
            events.append(GestureEvent(GestureKind.DRAG_END, target, tap_uv))
            state = replace(state, drag=None)
        else:
            slot = palette_hit(frame_size, len(doc.palette), tap.position)
            if slot is not None:
                if state.mode != "edit":
                    log.debug("palette tap ignored in run mode")
                else:
                    template = doc.palette[slot]
                    if template.kind is ElementKind.LOCK:
                        if state.focus is not None and any(
                                el.id == state.focus for el in doc.elements):
                            events.append(GestureEvent(GestureKind.LOCK, state.focus, tap_uv))
                        else:
                            log.debug("lock control tapped with nothing to lock")
                    else:
                        state = replace(state, clipboard=template.id)
                        events.append(GestureEvent(GestureKind.SELECT, template.id, tap_uv))
            elif 0.0 <= tap_uv[0] <= 1.0 and 0.0 <= tap_uv[1] <= 1.0:
                if state.clipboard is not None:
                    events.append(GestureEvent(GestureKind.PLACE, state.clipboard, tap_uv))
                    state = replace(state, clipboard=None)
                else:
                    el = hit_element(doc, tap_uv)
                    if el is None:
                        log.debug("tap on empty surface at %s", tap_uv)
                    elif el.locked:
                        events.append(GestureEvent(GestureKind.CLICK, el.id, tap_uv))
                    elif state.mode == "edit":
                        offset = (tap_uv[0] - el.bounds[0], tap_uv[1] - el.bounds[1])
                        state = replace(state, drag=(el.id, offset), focus=el.id)
                    else:
                        log.debug("tap on unlocked element in run mode ignored")
            else:
                log.debug("tap outside panel and palette ignored")

    # --- drag motion ------------------------------------------------------------
    moved = (primary_pos is not None and state.last_primary is not None
             and math.hypot(primary_pos[0] - state.last_primary[0],
                            primary_pos[1] - state.last_primary[1]) > params.motion_eps)
    if tap is None and state.drag is not None and primary_uv is not None and moved:
        target, offset = state.drag
        origin = (primary_uv[0] - offset[0], primary_uv[1] - offset[1])
        events.append(GestureEvent(GestureKind.DRAG_MOVE, target, origin))

    # --- wipe trace ------------------------------------------------------------
    if state.drag is not None or state.pinch is not None or primary_uv is None:
        if state.wipe_trace:
            state = replace(state, wipe_trace=())
    else:
        trace = (state.wipe_trace + (primary_uv,))[-params.wipe_frames:]
        fired = _check_wipe(trace, params)
        if fired is not None:
            events.append(GestureEvent(fired, SURFACE, primary_uv))
            trace = ()
        state = replace(state, wipe_trace=tuple(trace))

    # --- scan -------------------------------------------------------------------
    if not events and tap is None and moved:
        el = hit_element(doc, primary_uv)
        events.append(GestureEvent(GestureKind.SCAN,
                                   el.id if el is not None else SURFACE, primary_uv))

    return replace(state, last_primary=primary_pos), events
