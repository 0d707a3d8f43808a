"""From-scratch Canny pipeline and display-object quad extraction.

All stages are pure functions; per-frame calls may run in parallel. Images
enter as (h, w) float arrays in [0, 1] ("gray images").
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .raster import BinaryMask, Frame, connected_components


class BadParam(ValueError):
    pass


class ImageTooSmall(ValueError):
    pass


# confidence decays x0.8 per missed frame; 5 misses from 1.0 drop below this
DROP_CONFIDENCE = 0.35


@dataclass(frozen=True)
class CannyParams:
    """Blur width, strong-edge threshold, and the high:low threshold ratio."""

    sigma: float = 1.4
    t_high: float = 0.2
    ratio: float = 2.5

    def __post_init__(self):
        if self.sigma <= 0:
            raise BadParam("sigma must be positive")
        if self.t_high <= 0:
            raise BadParam("t_high must be positive")
        if not (2.0 <= self.ratio <= 3.0):
            warnings.warn(f"threshold ratio {self.ratio} outside the usual [2, 3] band",
                          stacklevel=2)

    @property
    def t_low(self) -> float:
        return self.t_high / self.ratio


@dataclass(frozen=True)
class DisplayQuad:
    """Tracked 4-corner pose of the physical model, ordered TL, BL, BR, TR.

    The order is counter-clockwise as seen on screen (y grows downward).
    """

    corners: np.ndarray
    confidence: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.corners, dtype=np.float64).reshape(4, 2)
        object.__setattr__(self, "corners", c)
        if self.area() <= 0:
            raise ValueError("quad corners must wind counter-clockwise with positive area")

    @property
    def tl(self) -> np.ndarray:
        return self.corners[0]

    @property
    def bl(self) -> np.ndarray:
        return self.corners[1]

    @property
    def br(self) -> np.ndarray:
        return self.corners[2]

    @property
    def tr(self) -> np.ndarray:
        return self.corners[3]

    def area(self) -> float:
        x, y = self.corners[:, 0], self.corners[:, 1]
        shoelace = np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)
        return float(-shoelace / 2.0)  # sign flipped for y-down image coordinates


def to_gray(frame: Frame) -> np.ndarray:
    """Rec. 601 luma of an RGB frame as floats in [0, 1]."""
    px = frame.pixels.astype(np.float64) / 255.0
    return 0.299 * px[..., 0] + 0.587 * px[..., 1] + 0.114 * px[..., 2]


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian sampled at integer offsets, radius ceil(3*sigma)."""
    if sigma <= 0:
        raise BadParam("sigma must be positive")
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(xs ** 2) / (2.0 * sigma ** 2))
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with clamp-to-edge borders."""
    k = gaussian_kernel(sigma)
    r = (len(k) - 1) // 2
    img = np.asarray(img, dtype=np.float64)
    padded = np.pad(img, ((0, 0), (r, r)), mode="edge")
    out = np.zeros_like(img)
    for i, kv in enumerate(k):
        out += kv * padded[:, i:i + img.shape[1]]
    padded = np.pad(out, ((r, r), (0, 0)), mode="edge")
    out2 = np.zeros_like(img)
    for i, kv in enumerate(k):
        out2 += kv * padded[i:i + img.shape[0], :]
    return out2


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64)


def sobel_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel magnitude and direction (atan2(gy, gx), y pointing down)."""
    img = np.asarray(img, dtype=np.float64)
    if img.shape[0] < 3 or img.shape[1] < 3:
        raise ImageTooSmall(f"sobel needs at least 3x3, got {img.shape}")
    padded = np.pad(img, 1, mode="edge")
    gx = np.zeros_like(img)
    gy = np.zeros_like(img)
    h, w = img.shape
    for dy in range(3):
        for dx in range(3):
            win = padded[dy:dy + h, dx:dx + w]
            gx += _SOBEL_X[dy, dx] * win
            gy += _SOBEL_Y[dy, dx] * win
    return np.hypot(gx, gy), np.arctan2(gy, gx)


# quantized gradient directions: x right, y down, 45 degrees = down-right
_DIR_DX = np.array([1, 1, 0, -1, -1, -1, 0, 1])
_DIR_DY = np.array([0, 1, 1, 1, 0, -1, -1, -1])


def _neighbor_mags(mag: np.ndarray, direction: np.ndarray):
    """Magnitude at the quantized forward/backward neighbor of every pixel."""
    h, w = mag.shape
    q = np.round(direction / (math.pi / 4.0)).astype(np.int64) % 8
    padded = np.pad(mag, 1, mode="constant")
    yy, xx = np.mgrid[0:h, 0:w]
    fwd = padded[yy + 1 + _DIR_DY[q], xx + 1 + _DIR_DX[q]]
    bwd = padded[yy + 1 - _DIR_DY[q], xx + 1 - _DIR_DX[q]]
    return fwd, bwd


def non_maximum_suppression(mag: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Keep pixels that dominate along the gradient direction.

    The comparison is strict against the forward neighbor and non-strict
    against the backward one, so a tied pair on a symmetric step keeps
    exactly one pixel instead of two (or none).
    """
    fwd, bwd = _neighbor_mags(mag, direction)
    return (mag > 0) & (mag > fwd) & (mag >= bwd)


def _dilate8(m: np.ndarray) -> np.ndarray:
    p = np.pad(m, 1, mode="constant")
    out = m.copy()
    h, w = m.shape
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            out |= p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
    return out


def hysteresis(mag: np.ndarray, keep: np.ndarray, t_high: float, t_low: float) -> np.ndarray:
    """Two-threshold edge acceptance: strong pixels plus weak pixels that are
    8-connected to a strong pixel through other accepted pixels."""
    strong = keep & (mag > t_high)
    weak = keep & (mag >= t_low)
    edges = strong.copy()
    while True:
        grown = _dilate8(edges) & weak
        grown |= edges
        if (grown == edges).all():
            return edges
        edges = grown


def canny(img: np.ndarray, params: CannyParams) -> BinaryMask:
    """Blur, Sobel gradients, non-maximum suppression, hysteresis.

    The low threshold is derived as t_high / ratio.
    """
    blurred = gaussian_blur(img, params.sigma)
    mag, direction = sobel_gradients(blurred)
    keep = non_maximum_suppression(mag, direction)
    edges = hysteresis(mag, keep, params.t_high, params.t_low)
    return BinaryMask(np.where(edges, 255, 0).astype(np.uint8))


# Moore neighborhood in clockwise order starting east (x right, y down)
_MOORE = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


def trace_boundary(mask: np.ndarray, start: tuple[int, int]) -> list[tuple[int, int]]:
    """Moore-neighbor boundary trace of the component containing `start`.

    `start` must be the component's first white pixel in row-major scan order
    (its west neighbor is then guaranteed black). Returns the closed boundary
    as an ordered pixel list with first != last. Terminates with Jacob's
    criterion: stop on re-entering the start pixel via the initial move.
    """
    h, w = mask.shape

    def white(x, y):
        return 0 <= x < w and 0 <= y < h and mask[y, x]

    sx, sy = start
    boundary = [(sx, sy)]
    cur = (sx, sy)
    entry_dir = 0  # pretend we entered the start pixel moving east
    first_move = None
    for _ in range(8 * h * w):
        scan_from = (entry_dir + 5) % 8  # clockwise, right after the backtrack
        for i in range(8):
            d = (scan_from + i) % 8
            nxt = (cur[0] + _MOORE[d][0], cur[1] + _MOORE[d][1])
            if white(*nxt):
                break
        else:
            return boundary  # isolated pixel
        if first_move is None:
            first_move = d
        elif cur == (sx, sy) and d == first_move:
            return boundary  # wrapped around: about to repeat the first move
        cur = nxt
        entry_dir = d
        if cur != (sx, sy):
            boundary.append(cur)
    return boundary


def _perpendicular_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    norm = np.hypot(*ab)
    if norm < 1e-12:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    cross = (pts[:, 0] - a[0]) * ab[1] - (pts[:, 1] - a[1]) * ab[0]
    return np.abs(cross) / norm


def simplify_polyline(points: np.ndarray, epsilon: float) -> np.ndarray:
    """Douglas-Peucker simplification of an open polyline."""
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) <= 2:
        return pts
    dists = _perpendicular_distance(pts[1:-1], pts[0], pts[-1])
    i = int(np.argmax(dists))
    if dists[i] <= epsilon:
        return np.array([pts[0], pts[-1]])
    left = simplify_polyline(pts[:i + 2], epsilon)
    right = simplify_polyline(pts[i + 1:], epsilon)
    return np.vstack([left[:-1], right])


def simplify_closed(points: np.ndarray, epsilon: float) -> np.ndarray:
    """Douglas-Peucker on a closed contour: split at the two most distant
    anchor points, simplify both halves, and rejoin.

    The split anchors always survive the halves, so a start point that sits
    mid-side would linger as a collinear vertex; a final prune removes any
    vertex within epsilon of its neighbors' chord.
    """
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) <= 3:
        return pts
    far = int(np.argmax(np.hypot(pts[:, 0] - pts[0, 0], pts[:, 1] - pts[0, 1])))
    first = simplify_polyline(pts[:far + 1], epsilon)
    second = simplify_polyline(np.vstack([pts[far:], pts[:1]]), epsilon)
    out = np.vstack([first[:-1], second[:-1]])
    while len(out) > 3:
        dists = np.array([
            _perpendicular_distance(out[i:i + 1], out[i - 1], out[(i + 1) % len(out)])[0]
            for i in range(len(out))
        ])
        i = int(np.argmin(dists))
        if dists[i] > epsilon:
            break
        out = np.delete(out, i, axis=0)
    return out


def _fit_line(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Total-least-squares line through points: (point on line, unit direction)."""
    mean = pts.mean(axis=0)
    centered = pts - mean
    evals, evecs = np.linalg.eigh(centered.T @ centered)
    return mean, evecs[:, int(np.argmax(evals))]


def _intersect_lines(p1, d1, p2, d2) -> np.ndarray | None:
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < 1e-9:
        return None
    t = ((p2[0] - p1[0]) * d2[1] - (p2[1] - p1[1]) * d2[0]) / denom
    return p1 + t * d1


def _refine_corners(contour: np.ndarray, corners: np.ndarray, epsilon: float) -> np.ndarray:
    """Sharpen simplification vertices against the raw contour.

    Each side's interior points (end fifths dropped, where corner rounding
    lives) get a fitted line; adjacent side lines intersect at the refined
    corner. Degenerate sides fall back to the unrefined vertex.
    """
    n = len(contour)
    idx = []
    for c in corners:
        match = np.nonzero((contour[:, 0] == c[0]) & (contour[:, 1] == c[1]))[0]
        if len(match) == 0:
            return corners
        idx.append(int(match[0]))

    lines = []
    for k in range(4):
        i, j = idx[k], idx[(k + 1) % 4]
        seg = contour[i:j + 1] if i <= j else np.vstack([contour[i:], contour[:j + 1]])
        margin = max(len(seg) // 5, 1)
        interior = seg[margin:len(seg) - margin]
        if len(interior) < 2:
            interior = seg
        lines.append(_fit_line(interior))

    refined = corners.copy()
    for k in range(4):
        pt = _intersect_lines(*lines[(k + 3) % 4], *lines[k])
        if pt is not None and np.hypot(*(pt - corners[k])) <= 2.0 * epsilon:
            refined[k] = pt
    return refined


def order_quad_corners(corners: np.ndarray) -> np.ndarray:
    """Canonical corner order: counter-clockwise on screen, starting top-left."""
    pts = np.asarray(corners, dtype=np.float64).reshape(4, 2)
    c = pts.mean(axis=0)
    ang = np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0])
    pts = pts[np.argsort(-ang)]  # descending angle = screen counter-clockwise
    start = int(np.argmin(pts.sum(axis=1)))  # min x+y plays top-left
    return np.roll(pts, -start, axis=0)


def extract_display_quad(edges: BinaryMask, prev: DisplayQuad | None) -> DisplayQuad | None:
    """Fit a quad to the largest closed edge contour, or decay the old track.

    The contour is simplified with tolerance 2% of its perimeter; a 4-vertex
    result covering at least 5% of the frame becomes the new quad at full
    confidence. Otherwise the previous quad is returned with confidence
    decayed by 0.8, and dropped entirely once it falls below DROP_CONFIDENCE.
    """
    comps = connected_components(edges)
    if comps:
        comp = comps[0]
        mask = np.zeros((edges.height, edges.width), dtype=bool)
        mask[comp.pixels[:, 1], comp.pixels[:, 0]] = True
        order = np.lexsort((comp.pixels[:, 0], comp.pixels[:, 1]))
        start = tuple(comp.pixels[order[0]].tolist())
        contour = np.array(trace_boundary(mask, start), dtype=np.float64)
        if len(contour) >= 4:
            closed = np.vstack([contour, contour[:1]])
            perimeter = float(np.hypot(*np.diff(closed, axis=0).T).sum())
            epsilon = 0.02 * perimeter
            simplified = simplify_closed(contour, epsilon)
            if len(simplified) == 4:
                try:
                    quad_pts = order_quad_corners(_refine_corners(contour, simplified, epsilon))
                    quad = DisplayQuad(quad_pts, 1.0)
                except ValueError:
                    quad_pts = order_quad_corners(simplified)
                    quad = DisplayQuad(quad_pts, 1.0)
                if quad.area() >= 0.05 * edges.width * edges.height:
                    return quad
    if prev is None:
        return None
    decayed = prev.confidence * 0.8
    if decayed < DROP_CONFIDENCE:
        return None
    return DisplayQuad(prev.corners, decayed)
