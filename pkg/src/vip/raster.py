"""Raster types, HSV segmentation, connected components and marker geometry.

Everything in this module is a pure function over immutable inputs; frames
and masks wrap numpy arrays and are safe to share across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class EmptyPointSet(ValueError):
    """Raised when a geometric fit is requested on zero points."""


@dataclass(frozen=True)
class Frame:
    """One RGB camera sample: (h, w, 3) uint8 pixels plus a millisecond timestamp."""

    pixels: np.ndarray
    timestamp_ms: int = 0

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"frame pixels must be (h, w, 3) uint8, got {px.shape}")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class BinaryMask:
    """Per-pixel byte mask; values are exactly 0 or 255."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.uint8)
        if v.ndim != 2:
            raise ValueError(f"mask must be 2-D, got {v.shape}")
        if not np.isin(v, (0, 255)).all():
            raise ValueError("mask values must be 0 or 255")
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class HsvColor:
    """Hue in degrees [0, 360), saturation and value as fractions in [0, 1].

    Achromatic colors (s == 0) carry h == 0 canonically.
    """

    h: float
    s: float
    v: float


@dataclass(frozen=True)
class HsvRange:
    """Inclusive HSV interval; hue_min > hue_max means the hue band wraps 0 degrees."""

    hue_min: float
    hue_max: float
    sat_min: float
    sat_max: float
    val_min: float
    val_max: float

    def __post_init__(self):
        if self.sat_min > self.sat_max:
            raise ValueError("sat_min > sat_max")
        if self.val_min > self.val_max:
            raise ValueError("val_min > val_max")

    def contains(self, c: HsvColor) -> bool:
        if not (self.sat_min <= c.s <= self.sat_max):
            return False
        if not (self.val_min <= c.v <= self.val_max):
            return False
        if self.hue_min <= self.hue_max:
            return self.hue_min <= c.h <= self.hue_max
        return c.h >= self.hue_min or c.h <= self.hue_max


def rgb_to_hsv(r: int, g: int, b: int) -> HsvColor:
    """Hexcone RGB(0..255) to HSV conversion. Total and deterministic."""
    rf, gf, bf = r / 255.0, g / 255.0, b / 255.0
    mx = max(rf, gf, bf)
    mn = min(rf, gf, bf)
    delta = mx - mn
    v = mx
    s = 0.0 if mx == 0.0 else delta / mx
    if delta == 0.0:
        h = 0.0
    elif mx == rf:
        h = 60.0 * (((gf - bf) / delta) % 6.0)
    elif mx == gf:
        h = 60.0 * ((bf - rf) / delta + 2.0)
    else:
        h = 60.0 * ((rf - gf) / delta + 4.0)
    if h >= 360.0:
        h -= 360.0
    return HsvColor(h, s, v)


def rgb_image_to_hsv(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hexcone conversion of an (h, w, 3) uint8 image to H/S/V planes."""
    rgb = pixels.astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = mx - mn

    v = mx
    s = np.zeros_like(mx)
    nonzero = mx > 0.0
    s[nonzero] = delta[nonzero] / mx[nonzero]

    h = np.zeros_like(mx)
    chroma = delta > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        rmax = chroma & (mx == r)
        h[rmax] = 60.0 * (((g[rmax] - b[rmax]) / delta[rmax]) % 6.0)
        gmax = chroma & (mx == g) & ~rmax
        h[gmax] = 60.0 * ((b[gmax] - r[gmax]) / delta[gmax] + 2.0)
        bmax = chroma & ~rmax & ~gmax
        h[bmax] = 60.0 * ((r[bmax] - g[bmax]) / delta[bmax] + 4.0)
    h[h >= 360.0] -= 360.0
    return h, s, v


def segment(frame: Frame, rng: HsvRange) -> BinaryMask:
    """Binary mask of pixels whose HSV value lies inside `rng` (255 in, 0 out).

    The hue test honors wraparound intervals (hue_min > hue_max).
    """
    h, s, v = rgb_image_to_hsv(frame.pixels)
    inside = (
        (s >= rng.sat_min) & (s <= rng.sat_max)
        & (v >= rng.val_min) & (v <= rng.val_max)
    )
    if rng.hue_min <= rng.hue_max:
        inside &= (h >= rng.hue_min) & (h <= rng.hue_max)
    else:
        inside &= (h >= rng.hue_min) | (h <= rng.hue_max)
    return BinaryMask(np.where(inside, 255, 0).astype(np.uint8))


@dataclass(frozen=True)
class Component:
    """One 8-connected component of white mask pixels."""

    pixels: np.ndarray              # (n, 2) int32 columns x, y
    area: int
    bbox: tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive

    def pixel_centers(self) -> np.ndarray:
        # integer coordinates name pixel corners; fitting uses centers
        return self.pixels.astype(np.float64) + 0.5


_NEIGHBORS_8 = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]


def connected_components(mask: BinaryMask) -> list[Component]:
    """8-connected components of the 255-pixels, largest area first.

    Components partition the white set: disjoint and exhaustive. An all-black
    mask yields an empty list.
    """
    v = mask.values
    h, w = v.shape
    white = v == 255
    seen = np.zeros((h, w), dtype=bool)
    components: list[Component] = []
    ys, xs = np.nonzero(white)
    for seed_y, seed_x in zip(ys.tolist(), xs.tolist()):
        if seen[seed_y, seed_x]:
            continue
        stack = [(seed_x, seed_y)]
        seen[seed_y, seed_x] = True
        pts: list[tuple[int, int]] = []
        while stack:
            x, y = stack.pop()
            pts.append((x, y))
            for dx, dy in _NEIGHBORS_8:
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h and white[ny, nx] and not seen[ny, nx]:
                    seen[ny, nx] = True
                    stack.append((nx, ny))
        arr = np.array(pts, dtype=np.int32)
        bbox = (int(arr[:, 0].min()), int(arr[:, 1].min()),
                int(arr[:, 0].max()), int(arr[:, 1].max()))
        components.append(Component(arr, len(pts), bbox))
    # stable order: area descending, scan position of the seed as tiebreak
    components.sort(key=lambda c: (-c.area, c.bbox[1], c.bbox[0]))
    return components


@dataclass(frozen=True)
class OrientedRect:
    """Minimum-area enclosing rectangle; angle in degrees within [0, 90)."""

    center: tuple[float, float]
    width: float
    height: float
    angle: float

    def corners(self) -> np.ndarray:
        a = math.radians(self.angle)
        ux = np.array([math.cos(a), math.sin(a)])
        uy = np.array([-math.sin(a), math.cos(a)])
        c = np.array(self.center)
        hw, hh = self.width / 2.0, self.height / 2.0
        return np.array([c - ux * hw - uy * hh, c + ux * hw - uy * hh,
                         c + ux * hw + uy * hh, c - ux * hw + uy * hh])

    def contains(self, pt: tuple[float, float], tol: float = 1e-6) -> bool:
        a = math.radians(self.angle)
        dx = pt[0] - self.center[0]
        dy = pt[1] - self.center[1]
        lx = dx * math.cos(a) + dy * math.sin(a)
        ly = -dx * math.sin(a) + dy * math.cos(a)
        return abs(lx) <= self.width / 2.0 + tol and abs(ly) <= self.height / 2.0 + tol


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Andrew monotone chain; returns hull vertices in counter-clockwise order."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def min_area_rect(points) -> OrientedRect:
    """Minimum-area oriented rectangle over a nonempty point set.

    The optimum is attained with one side collinear with a convex hull edge,
    so candidate orientations are the hull edge directions. The rectangle
    center is the marker position reported downstream.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.size == 0:
        raise EmptyPointSet("min_area_rect needs at least one point")
    if pts.shape[1] != 2:
        raise ValueError(f"points must be (n, 2), got {pts.shape}")

    hull = convex_hull(pts)
    if len(hull) == 1:
        x, y = hull[0]
        return OrientedRect((float(x), float(y)), 0.0, 0.0, 0.0)
    if len(hull) == 2:
        d = hull[1] - hull[0]
        c = (hull[0] + hull[1]) / 2.0
        return _canonical_rect(tuple(c), float(np.hypot(*d)), 0.0,
                               math.degrees(math.atan2(d[1], d[0])))

    edges = np.roll(hull, -1, axis=0) - hull
    angles = np.arctan2(edges[:, 1], edges[:, 0])
    best = None
    for theta in angles.tolist():
        c, s = math.cos(theta), math.sin(theta)
        u = pts[:, 0] * c + pts[:, 1] * s
        v = -pts[:, 0] * s + pts[:, 1] * c
        u0, u1 = u.min(), u.max()
        v0, v1 = v.min(), v.max()
        area = (u1 - u0) * (v1 - v0)
        if best is None or area < best[0] - 1e-12:
            cu, cv = (u0 + u1) / 2.0, (v0 + v1) / 2.0
            center = (cu * c - cv * s, cu * s + cv * c)
            best = (area, center, u1 - u0, v1 - v0, math.degrees(theta))
    _, center, w, h, ang = best
    return _canonical_rect(center, w, h, ang)


def _canonical_rect(center, width, height, angle_deg) -> OrientedRect:
    """Normalize angle into [0, 90), swapping width/height when axes flip."""
    a = angle_deg % 180.0
    if a >= 90.0:
        a -= 90.0
        width, height = height, width
    return OrientedRect((float(center[0]), float(center[1])),
                        float(width), float(height), float(a))
