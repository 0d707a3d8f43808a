"""Panel compositing and affine fitting into the tracked display quad.

All drawing is deterministic: fixed colors, glyph-box text, integer
rasterization. Identical documents and assets produce identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .panel import ElementKind, PanelElement, PrototypeDoc
from .pnm import read_ppm
from .raster import Frame

BACKGROUND = (24, 24, 28)
INK = (230, 230, 235)
LOCK_BORDER = (240, 200, 60)
_FILL = {
    ElementKind.BUTTON: (70, 110, 190),
    ElementKind.LABEL: (60, 60, 70),
    ElementKind.SLIDER: (50, 50, 60),
    ElementKind.SCREEN: (10, 10, 12),
    ElementKind.LOCK: (120, 80, 40),
}
SLIDER_KNOB = (180, 180, 190)


class DegenerateTarget(ValueError):
    pass


class DegenerateTransform(ValueError):
    pass


class AssetMissing(FileNotFoundError):
    def __init__(self, path: str):
        super().__init__(path)
        self.path = path


@dataclass(frozen=True)
class AffineTransform:
    """Row-major 2x3 map: (x,y) -> (a x + b y + tx, c x + d y + ty)."""

    a: float
    b: float
    tx: float
    c: float
    d: float
    ty: float

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply(self, points):
        pts = np.asarray(points, dtype=np.float64)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        out = np.empty_like(pts)
        out[:, 0] = self.a * pts[:, 0] + self.b * pts[:, 1] + self.tx
        out[:, 1] = self.c * pts[:, 0] + self.d * pts[:, 1] + self.ty
        return out[0] if single else out

    def compose(self, inner: "AffineTransform") -> "AffineTransform":
        """self after inner: (self.compose(inner)).apply(p) == self.apply(inner.apply(p))."""
        return AffineTransform(
            self.a * inner.a + self.b * inner.c,
            self.a * inner.b + self.b * inner.d,
            self.a * inner.tx + self.b * inner.ty + self.tx,
            self.c * inner.a + self.d * inner.c,
            self.c * inner.b + self.d * inner.d,
            self.c * inner.tx + self.d * inner.ty + self.ty,
        )

    def inverse(self) -> "AffineTransform":
        det = self.determinant
        if not math.isfinite(det) or abs(det) <= 1e-9:
            raise DegenerateTransform(f"determinant {det} too small to invert")
        return AffineTransform(
            self.d / det, -self.b / det, (self.b * self.ty - self.d * self.tx) / det,
            -self.c / det, self.a / det, (self.c * self.tx - self.a * self.ty) / det,
        )


def fit_affine(src_size, tl, tr, bl) -> AffineTransform:
    """Unique affine map sending (0,0)->tl, (w,0)->tr, (0,h)->bl."""
    w, h = src_size
    if w <= 0 or h <= 0:
        raise DegenerateTarget("source rectangle must have positive size")
    tl = np.asarray(tl, dtype=np.float64)
    tr = np.asarray(tr, dtype=np.float64)
    bl = np.asarray(bl, dtype=np.float64)
    ex = tr - tl
    ey = bl - tl
    if abs(ex[0] * ey[1] - ex[1] * ey[0]) <= 1e-9:
        raise DegenerateTarget("target anchor points are collinear")
    return AffineTransform(
        ex[0] / w, ey[0] / h, float(tl[0]),
        ex[1] / w, ey[1] / h, float(tl[1]),
    )


def warp_into(composite: Frame, t: AffineTransform, target: Frame) -> Frame:
    """Map the composite into the target by inverse-mapped bilinear sampling.

    Destination pixels whose preimage falls outside the composite stay
    untouched. The identity transform is a bit-exact copy.
    """
    inv = t.inverse()
    th, tw = target.pixels.shape[:2]
    sh, sw = composite.pixels.shape[:2]

    xs, ys = np.meshgrid(np.arange(tw, dtype=np.float64),
                         np.arange(th, dtype=np.float64))
    sx = inv.a * xs + inv.b * ys + inv.tx
    sy = inv.c * xs + inv.d * ys + inv.ty
    inside = (sx >= 0) & (sx <= sw - 1) & (sy >= 0) & (sy <= sh - 1)

    out = target.pixels.copy()
    if inside.any():
        sxi = sx[inside]
        syi = sy[inside]
        x0 = np.floor(sxi).astype(np.intp)
        y0 = np.floor(syi).astype(np.intp)
        x1 = np.minimum(x0 + 1, sw - 1)
        y1 = np.minimum(y0 + 1, sh - 1)
        fx = (sxi - x0)[:, None]
        fy = (syi - y0)[:, None]
        src = composite.pixels.astype(np.float64)
        top = src[y0, x0] * (1 - fx) + src[y0, x1] * fx
        bottom = src[y1, x0] * (1 - fx) + src[y1, x1] * fx
        sample = top * (1 - fy) + bottom * fy
        out[inside] = np.clip(np.rint(sample), 0, 255).astype(np.uint8)
    return Frame(out, target.timestamp_ms)


# ------------------------------------------------------------------ compositing

def _fill_rect(img: np.ndarray, x0: int, y0: int, x1: int, y1: int, color) -> None:
    h, w = img.shape[:2]
    x0, x1 = max(x0, 0), min(x1, w)
    y0, y1 = max(y0, 0), min(y1, h)
    if x0 < x1 and y0 < y1:
        img[y0:y1, x0:x1] = color


def _outline_rect(img: np.ndarray, x0: int, y0: int, x1: int, y1: int, color) -> None:
    _fill_rect(img, x0, y0, x1, y0 + 1, color)
    _fill_rect(img, x0, y1 - 1, x1, y1, color)
    _fill_rect(img, x0, y0, x0 + 1, y1, color)
    _fill_rect(img, x1 - 1, y0, x1, y1, color)


def _draw_glyph_boxes(img: np.ndarray, text: str, x: int, y: int, color) -> None:
    # one 3x5 box per non-space character, 1 px apart: stable stand-in for text
    for i, ch in enumerate(text):
        if ch != " ":
            _fill_rect(img, x + i * 4, y, x + i * 4 + 3, y + 5, color)


def _element_rect(el: PanelElement, resolution) -> tuple[int, int, int, int]:
    w, h = resolution
    u, v, ew, eh = el.bounds
    x0 = int(round(u * w))
    y0 = int(round(v * h))
    x1 = int(round((u + ew) * w))
    y1 = int(round((v + eh) * h))
    return x0, y0, x1, y1


def _scale_nearest(src: np.ndarray, tw: int, th: int) -> np.ndarray:
    sh, sw = src.shape[:2]
    cols = np.minimum((np.arange(tw, dtype=np.float64) + 0.5) * sw / tw, sw - 1).astype(np.intp)
    rows = np.minimum((np.arange(th, dtype=np.float64) + 0.5) * sh / th, sh - 1).astype(np.intp)
    return src[rows[:, None], cols[None, :]]


def _screen_frame(el: PanelElement, asset_root) -> np.ndarray:
    sequence = el.state["sequence"]
    if asset_root is None:
        raise AssetMissing(sequence)
    directory = Path(asset_root) / sequence
    if not directory.is_dir():
        raise AssetMissing(str(directory))
    files = sorted(directory.glob("*.ppm"))
    index = int(el.state["frame_index"])
    if index >= len(files):
        raise AssetMissing(str(directory / f"frame index {index}"))
    return read_ppm(files[index]).pixels


def compose_panel(doc: PrototypeDoc, resolution, asset_root=None) -> Frame:
    """Flatten the document into one frame, elements back-to-front by z."""
    w, h = resolution
    if w <= 0 or h <= 0:
        raise ValueError("resolution must be positive")
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:] = BACKGROUND

    order = sorted(range(len(doc.elements)), key=lambda i: (doc.elements[i].z, i))
    for i in order:
        el = doc.elements[i]
        x0, y0, x1, y1 = _element_rect(el, resolution)
        if x0 >= x1 or y0 >= y1:
            continue
        _fill_rect(img, x0, y0, x1, y1, _FILL[el.kind])
        if el.kind is ElementKind.SCREEN:
            # document bounds are clamped, so the rect is always inside the image
            img[y0:y1, x0:x1] = _scale_nearest(_screen_frame(el, asset_root),
                                               x1 - x0, y1 - y0)
        elif el.kind is ElementKind.SLIDER:
            ty0 = y0 + (y1 - y0) // 3
            ty1 = y1 - (y1 - y0) // 3
            _fill_rect(img, x0 + 1, ty0, x1 - 1, max(ty1, ty0 + 1), (90, 90, 100))
            knob_w = max((x1 - x0) // 10, 2)
            kx = x0 + 1 + int(round(float(el.state["value"]) * (x1 - x0 - 2 - knob_w)))
            _fill_rect(img, kx, y0 + 1, kx + knob_w, y1 - 1, SLIDER_KNOB)
        elif el.kind is ElementKind.BUTTON:
            _draw_glyph_boxes(img, el.id, x0 + 2, y0 + 2, INK)
        elif el.kind is ElementKind.LABEL:
            _draw_glyph_boxes(img, str(el.state["text"]), x0 + 2, y0 + 2, INK)
        if el.locked:
            _outline_rect(img, x0, y0, x1, y1, LOCK_BORDER)
    return Frame(img, 0.0)
