"""Independent reference implementations the test suite checks against.

Everything here is deliberately written the slow, obvious way (per-pixel
loops, stdlib colorsys, brute-force sweeps) so that agreement with the
library is evidence, not tautology.
"""
from __future__ import annotations

import cmath
import colorsys
import math
from collections import deque

import numpy as np


def hsv_mask_oracle(pixels: np.ndarray, rng) -> np.ndarray:
    """Per-pixel colorsys segmentation; returns a bool (h, w) array."""
    h, w, _ = pixels.shape
    out = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            r, g, b = (int(v) for v in pixels[y, x])
            hh, ss, vv = colorsys.rgb_to_hsv(r / 255.0, g / 255.0, b / 255.0)
            hue = hh * 360.0
            if not (rng.sat_min <= ss <= rng.sat_max):
                continue
            if not (rng.val_min <= vv <= rng.val_max):
                continue
            if rng.hue_min <= rng.hue_max:
                ok = rng.hue_min <= hue <= rng.hue_max
            else:
                ok = hue >= rng.hue_min or hue <= rng.hue_max
            if ok:
                out[y, x] = True
    return out


def flood_components_oracle(values: np.ndarray) -> list[frozenset]:
    """8-connected components of the 255 pixels via BFS; set-of-(x, y) each."""
    h, w = values.shape
    seen = np.zeros((h, w), dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if values[y, x] != 255 or seen[y, x]:
                continue
            queue = deque([(x, y)])
            seen[y, x] = True
            pts = set()
            while queue:
                cx, cy = queue.popleft()
                pts.add((cx, cy))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        nx, ny = cx + dx, cy + dy
                        if (0 <= nx < w and 0 <= ny < h
                                and values[ny, nx] == 255 and not seen[ny, nx]):
                            seen[ny, nx] = True
                            queue.append((nx, ny))
            comps.append(frozenset(pts))
    return comps


def min_rect_area_sweep(points: np.ndarray, step_deg: float = 0.02) -> float:
    """Brute-force minimum oriented bounding-box area over a fine angle sweep."""
    pts = np.asarray(points, dtype=np.float64)
    best = math.inf
    for deg in np.arange(0.0, 90.0, step_deg):
        t = math.radians(deg)
        c, s = math.cos(t), math.sin(t)
        u = pts[:, 0] * c + pts[:, 1] * s
        v = -pts[:, 0] * s + pts[:, 1] * c
        area = (u.max() - u.min()) * (v.max() - v.min())
        best = min(best, area)
    return best


def sobel_loops_oracle(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel via explicit per-pixel loops over an edge-padded image."""
    kx = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    ky = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]
    h, w = img.shape
    padded = np.pad(img, 1, mode="edge")
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            sx = sy = 0.0
            for dy in range(3):
                for dx in range(3):
                    sx += kx[dy][dx] * padded[y + dy, x + dx]
                    sy += ky[dy][dx] * padded[y + dy, x + dx]
            gx[y, x] = sx
            gy[y, x] = sy
    return np.hypot(gx, gy), np.arctan2(gy, gx)


def gaussian_loops_oracle(img: np.ndarray, sigma: float) -> np.ndarray:
    """Full 2-D Gaussian convolution (outer-product kernel, edge padding)."""
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k1 = np.exp(-(xs ** 2) / (2.0 * sigma ** 2))
    k1 /= k1.sum()
    k2 = np.outer(k1, k1)
    h, w = img.shape
    padded = np.pad(img, radius, mode="edge")
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            out[y, x] = (padded[y:y + 2 * radius + 1, x:x + 2 * radius + 1] * k2).sum()
    return out


def biquad_gain_oracle(b: np.ndarray, a: np.ndarray, freq: float, sample_rate: int) -> float:
    """|H(e^{j omega})| of a biquad from its transfer function directly."""
    z = cmath.exp(-2j * math.pi * freq / sample_rate)
    num = b[0] + b[1] * z + b[2] * z * z
    den = a[0] + a[1] * z + a[2] * z * z
    return abs(num / den)


def affine_solve_oracle(src_pts, dst_pts) -> tuple[float, float, float, float, float, float]:
    """Affine coefficients (a, b, tx, c, d, ty) from three point pairs via
    a dense 6x6 linear solve."""
    rows = []
    rhs = []
    for (sx, sy), (dx, dy) in zip(src_pts, dst_pts):
        rows.append([sx, sy, 1, 0, 0, 0])
        rhs.append(dx)
        rows.append([0, 0, 0, sx, sy, 1])
        rhs.append(dy)
    a, b, tx, c, d, ty = np.linalg.solve(np.array(rows, dtype=np.float64),
                                         np.array(rhs, dtype=np.float64))
    return float(a), float(b), float(tx), float(c), float(d), float(ty)


def bilinear_forward_oracle(uv, quad_corners) -> tuple[float, float]:
    """Forward bilinear interpolation of the quad at (u, v)."""
    (ax, ay), (blx, bly), (brx, bry), (trx, try_) = quad_corners
    u, v = uv
    top_x = ax + u * (trx - ax)
    top_y = ay + u * (try_ - ay)
    bot_x = blx + u * (brx - blx)
    bot_y = bly + u * (bry - bly)
    return (top_x + v * (bot_x - top_x), top_y + v * (bot_y - top_y))
