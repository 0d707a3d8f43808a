"""Shared fixture builders: rasterized quads, prototype documents, scenes."""
from __future__ import annotations

import numpy as np
import pytest

from vip.panel import Connection, ElementKind, PanelElement, PrototypeDoc
from vip.raster import BinaryMask


def rasterize_quad_outline(corners, width: int, height: int) -> BinaryMask:
    """Stamp the quad's boundary into a mask, one pixel per rounded sample."""
    mask = np.zeros((height, width), dtype=np.uint8)
    pts = np.asarray(corners, dtype=np.float64)
    for k in range(len(pts)):
        a, b = pts[k], pts[(k + 1) % len(pts)]
        n = int(np.ceil(np.hypot(*(b - a)))) * 2 + 1
        for t in np.linspace(0.0, 1.0, n):
            x, y = a + t * (b - a)
            mask[int(round(y)), int(round(x))] = 255
    return BinaryMask(mask)


def quad_interior_angles(pts: np.ndarray) -> np.ndarray:
    out = []
    for k in range(4):
        a, b, c = pts[(k - 1) % 4], pts[k], pts[(k + 1) % 4]
        u, v = a - b, c - b
        cosang = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
        out.append(np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0))))
    return np.asarray(out)


def sample_convex_quad(rng: np.random.Generator, width: int = 128, height: int = 128,
                       min_area_frac: float = 0.10) -> np.ndarray:
    """A random convex quad whose corners are resolvable in the raster.

    Interior angles are kept in [35, 145] degrees and sides at least 18 px:
    a corner flatter than that sits under a pixel of the straight side and
    no detector could recover it from the mask.
    """
    while True:
        pts = rng.uniform(6.0, min(width, height) - 6.0, size=(4, 2))
        c = pts.mean(axis=0)
        ang = np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0])
        pts = pts[np.argsort(-ang)]  # counter-clockwise on screen (y down)
        area = 0.5 * abs(np.dot(pts[:, 0], np.roll(pts[:, 1], -1))
                         - np.dot(np.roll(pts[:, 0], -1), pts[:, 1]))
        if area < min_area_frac * width * height:
            continue
        sides = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
        if sides.min() < 18.0:
            continue
        angles = quad_interior_angles(pts)
        if angles.min() < 35.0 or angles.max() > 145.0:
            continue
        start = int(np.argmin(pts.sum(axis=1)))
        return np.roll(pts, -start, axis=0)


def corner_match_error(detected: np.ndarray, truth: np.ndarray) -> float:
    """Max corner distance under the best cyclic alignment (either direction).

    Canonical ordering is covered by its own tests; random quads can tie on
    the top-left rule, so recovery accuracy must not depend on it.
    """
    best = np.inf
    for k in range(4):
        rolled = np.roll(truth, -k, axis=0)
        best = min(best, float(np.hypot(*(detected - rolled).T).max()))
        best = min(best, float(np.hypot(*(detected - rolled[::-1]).T).max()))
    return best


def standard_palette() -> tuple[PanelElement, ...]:
    return (
        PanelElement("button", ElementKind.BUTTON, (0.0, 0.0, 0.18, 0.10)),
        PanelElement("screen", ElementKind.SCREEN, (0.0, 0.0, 0.30, 0.24),
                     state={"sequence": "", "length": 1, "frame_index": 0}),
        PanelElement("slider", ElementKind.SLIDER, (0.0, 0.0, 0.25, 0.06),
                     state={"value": 0.5}),
        PanelElement("label", ElementKind.LABEL, (0.0, 0.0, 0.20, 0.08),
                     state={"text": ""}),
        PanelElement("lock", ElementKind.LOCK, (0.0, 0.0, 0.10, 0.10)),
    )


def make_doc(elements=(), connections=(), mode="edit", inspector_open=False) -> PrototypeDoc:
    return PrototypeDoc(tuple(elements), tuple(Connection(tuple(c[0]), tuple(c[1]))
                                               for c in connections),
                        mode, standard_palette(), inspector_open)


def atm_doc() -> PrototypeDoc:
    """Keypad-and-screen prototype: three locked buttons advance a four-frame
    screen sequence, a slider feeds a readout label."""
    elements = (
        PanelElement("screen-1", ElementKind.SCREEN, (0.30, 0.05, 0.40, 0.35), locked=True,
                     state={"sequence": "atm", "length": 4, "frame_index": 0}),
        PanelElement("key-1", ElementKind.BUTTON, (0.10, 0.50, 0.20, 0.15), locked=True),
        PanelElement("key-2", ElementKind.BUTTON, (0.40, 0.50, 0.20, 0.15), locked=True),
        PanelElement("key-3", ElementKind.BUTTON, (0.70, 0.50, 0.20, 0.15), locked=True),
        PanelElement("amount", ElementKind.SLIDER, (0.10, 0.75, 0.50, 0.08), locked=True,
                     state={"value": 0.5}),
        PanelElement("readout", ElementKind.LABEL, (0.65, 0.75, 0.25, 0.08), locked=True,
                     state={"text": ""}),
    )
    connections = (
        Connection(("key-1", "pressed"), ("screen-1", "advance")),
        Connection(("key-2", "pressed"), ("screen-1", "advance")),
        Connection(("key-3", "pressed"), ("screen-1", "advance")),
        Connection(("amount", "value"), ("readout", "text")),
    )
    return PrototypeDoc(elements, connections, "edit", standard_palette(), False)


def random_doc(rng: np.random.Generator) -> PrototypeDoc:
    """A structurally valid random document for round-trip fuzzing."""
    from vip.panel import clamp_bounds

    kinds = [ElementKind.BUTTON, ElementKind.SCREEN, ElementKind.SLIDER, ElementKind.LABEL]
    words = ("ok", "go", "menu", "pay", "back", "")
    elements = []
    for i in range(int(rng.integers(0, 9))):
        kind = kinds[int(rng.integers(0, len(kinds)))]
        if kind is ElementKind.SCREEN:
            length = int(rng.integers(1, 12))
            state = {"sequence": str(rng.choice(["atm", "demo", ""])),
                     "length": length,
                     "frame_index": int(rng.integers(0, length))}
        elif kind is ElementKind.SLIDER:
            state = {"value": float(rng.uniform(0.0, 1.0))}
        elif kind is ElementKind.LABEL:
            state = {"text": str(rng.choice(words))}
        else:
            state = {}
        raw = (float(rng.uniform(-0.1, 1.0)), float(rng.uniform(-0.1, 1.0)),
               float(rng.uniform(0.02, 0.6)), float(rng.uniform(0.02, 0.6)))
        elements.append(PanelElement(
            id=f"el-{i}", kind=kind, bounds=clamp_bounds(raw),
            locked=bool(rng.integers(0, 2)), z=int(rng.integers(0, 5)), state=state))

    sources = [el for el in elements if el.kind in (ElementKind.BUTTON, ElementKind.SLIDER)]
    sinks = [el for el in elements if el.kind in (ElementKind.SCREEN, ElementKind.LABEL)]
    connections = []
    if sources and sinks:
        for _ in range(int(rng.integers(0, 5))):
            src = sources[int(rng.integers(0, len(sources)))]
            if src.kind is ElementKind.BUTTON:
                targets = [el for el in sinks if el.kind is ElementKind.SCREEN]
                if not targets:
                    continue
                dst = targets[int(rng.integers(0, len(targets)))]
                connections.append(Connection((src.id, "pressed"), (dst.id, "advance")))
            else:
                dst = sinks[int(rng.integers(0, len(sinks)))]
                inlet = "jump" if dst.kind is ElementKind.SCREEN else "text"
                connections.append(Connection((src.id, "value"), (dst.id, inlet)))

    return PrototypeDoc(tuple(elements), tuple(connections),
                        str(rng.choice(["edit", "run"])), standard_palette(),
                        bool(rng.integers(0, 2)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0x5EED)
