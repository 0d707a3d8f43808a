"""Affine fitting, warping, and deterministic panel compositing."""
from __future__ import annotations

import numpy as np
import pytest

from vip.panel import ElementKind, PanelElement
from vip.pnm import write_ppm
from vip.raster import Frame
from vip.render import (BACKGROUND, INK, LOCK_BORDER, SLIDER_KNOB, AffineTransform,
                        AssetMissing, DegenerateTarget, DegenerateTransform,
                        compose_panel, fit_affine, warp_into)

from _oracles import affine_solve_oracle
from conftest import make_doc


def _rand_frame(rng, w=40, h=30) -> Frame:
    return Frame(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8).copy(), 0.0)


# ------------------------------------------------------------------ transforms

def test_identity_and_apply_shapes():
    t = AffineTransform.identity()
    assert tuple(t.apply((3.0, 4.0))) == (3.0, 4.0)
    pts = np.array([[0.0, 0.0], [1.0, 2.0]])
    assert np.array_equal(t.apply(pts), pts)


def test_compose_matches_sequential_application(rng):
    for _ in range(20):
        t1 = AffineTransform(*rng.uniform(-2, 2, size=6))
        t2 = AffineTransform(*rng.uniform(-2, 2, size=6))
        p = rng.uniform(-10, 10, size=2)
        assert t1.compose(t2).apply(p) == pytest.approx(t1.apply(t2.apply(p)), abs=1e-12)


def test_inverse_round_trips_points(rng):
    for _ in range(20):
        t = AffineTransform(*rng.uniform(-2, 2, size=6))
        if abs(t.determinant) < 1e-3:
            continue
        p = rng.uniform(-10, 10, size=2)
        assert t.inverse().apply(t.apply(p)) == pytest.approx(p, abs=1e-9)


def test_singular_transform_refuses_to_invert():
    with pytest.raises(DegenerateTransform):
        AffineTransform(1.0, 2.0, 0.0, 2.0, 4.0, 0.0).inverse()


def test_fit_affine_unit_square_example():
    t = fit_affine((1, 1), (2, 1), (4, 1), (2, 5))
    assert (t.a, t.b, t.tx, t.c, t.d, t.ty) == (2.0, 0.0, 2.0, 0.0, 4.0, 1.0)


def test_fit_affine_reproduces_anchors(rng):
    for _ in range(50):
        w, h = rng.uniform(1, 200, size=2)
        tl = rng.uniform(-50, 50, size=2)
        tr = rng.uniform(-50, 50, size=2)
        bl = rng.uniform(-50, 50, size=2)
        ex, ey = tr - tl, bl - tl
        if abs(ex[0] * ey[1] - ex[1] * ey[0]) < 1e-3:
            continue
        t = fit_affine((w, h), tl, tr, bl)
        assert t.apply((0.0, 0.0)) == pytest.approx(tl, abs=1e-9)
        assert t.apply((w, 0.0)) == pytest.approx(tr, abs=1e-9)
        assert t.apply((0.0, h)) == pytest.approx(bl, abs=1e-9)


def test_fit_affine_matches_linear_solve(rng):
    for _ in range(20):
        w, h = rng.uniform(1, 100, size=2)
        tl, tr, bl = (rng.uniform(-40, 40, size=2) for _ in range(3))
        ex, ey = tr - tl, bl - tl
        if abs(ex[0] * ey[1] - ex[1] * ey[0]) < 1e-3:
            continue
        t = fit_affine((w, h), tl, tr, bl)
        oracle = affine_solve_oracle([(0, 0), (w, 0), (0, h)], [tl, tr, bl])
        assert (t.a, t.b, t.tx, t.c, t.d, t.ty) == pytest.approx(oracle, abs=1e-9)


def test_fit_affine_rejects_bad_inputs():
    with pytest.raises(DegenerateTarget):
        fit_affine((0, 10), (0, 0), (1, 0), (0, 1))
    with pytest.raises(DegenerateTarget):
        fit_affine((10, 10), (0, 0), (1, 1), (2, 2))  # collinear anchors


# --------------------------------------------------------------------- warping

def test_identity_warp_is_bit_exact(rng):
    src = _rand_frame(rng)
    target = Frame(np.zeros_like(src.pixels), 7.0)
    out = warp_into(src, AffineTransform.identity(), target)
    assert np.array_equal(out.pixels, src.pixels)
    assert out.timestamp_ms == 7.0


def test_integer_shift_copies_pixels_and_leaves_rest(rng):
    src = _rand_frame(rng, w=8, h=6)
    target = Frame(np.full((20, 20, 3), 9, dtype=np.uint8), 0.0)
    out = warp_into(src, AffineTransform(1.0, 0.0, 5.0, 0.0, 1.0, 3.0), target)
    assert np.array_equal(out.pixels[3:9, 5:13], src.pixels)
    assert (out.pixels[:3] == 9).all() and (out.pixels[9:] == 9).all()
    assert (out.pixels[:, :5] == 9).all() and (out.pixels[:, 13:] == 9).all()


def test_warp_does_not_mutate_target(rng):
    src = _rand_frame(rng, w=8, h=6)
    target = Frame(np.zeros((10, 10, 3), dtype=np.uint8), 0.0)
    before = target.pixels.copy()
    warp_into(src, AffineTransform.identity(), target)
    assert np.array_equal(target.pixels, before)


def test_half_pixel_shift_averages_neighbors():
    px = np.zeros((1, 2, 3), dtype=np.uint8)
    px[0, 0] = 100
    px[0, 1] = 200
    target = Frame(np.zeros((1, 2, 3), dtype=np.uint8), 0.0)
    out = warp_into(Frame(px, 0.0), AffineTransform(1.0, 0.0, 0.5, 0.0, 1.0, 0.0), target)
    assert tuple(out.pixels[0, 1]) == (150, 150, 150)


def test_warp_determinism(rng):
    src = _rand_frame(rng)
    t = AffineTransform(0.9, 0.1, 3.0, -0.2, 1.1, 2.0)
    target = Frame(np.zeros((40, 50, 3), dtype=np.uint8), 0.0)
    a = warp_into(src, t, target)
    b = warp_into(src, t, target)
    assert np.array_equal(a.pixels, b.pixels)


# ----------------------------------------------------------------- compositing

def test_empty_doc_is_background():
    frame = compose_panel(make_doc(), (32, 24))
    assert frame.pixels.shape == (24, 32, 3)
    assert (frame.pixels == BACKGROUND).all()


def test_button_fill_and_lock_border():
    el = PanelElement("b-1", ElementKind.BUTTON, (0.25, 0.25, 0.5, 0.5), locked=True)
    img = compose_panel(make_doc([el]), (40, 40)).pixels
    assert tuple(img[20, 25]) == (70, 110, 190)
    assert tuple(img[10, 10]) == LOCK_BORDER       # top-left corner of the outline
    assert tuple(img[5, 5]) == BACKGROUND


def test_unlocked_element_has_no_border():
    el = PanelElement("b-1", ElementKind.BUTTON, (0.25, 0.25, 0.5, 0.5))
    img = compose_panel(make_doc([el]), (40, 40)).pixels
    assert tuple(img[10, 10]) == (70, 110, 190)


def test_z_order_back_to_front():
    lo = PanelElement("lo", ElementKind.BUTTON, (0.1, 0.1, 0.5, 0.5), z=1)
    hi = PanelElement("hi", ElementKind.LABEL, (0.3, 0.3, 0.5, 0.5), z=2,
                      state={"text": ""})
    img = compose_panel(make_doc([hi, lo]), (100, 100)).pixels
    assert tuple(img[50, 50]) == (60, 60, 70)      # label paints over button
    assert tuple(img[15, 15]) == (70, 110, 190)
    # equal z: later list entry wins
    twin = PanelElement("twin", ElementKind.LABEL, (0.1, 0.1, 0.5, 0.5), z=1,
                        state={"text": ""})
    img = compose_panel(make_doc([lo, twin]), (100, 100)).pixels
    assert tuple(img[30, 30]) == (60, 60, 70)


def test_slider_knob_tracks_value():
    def knob_x(value):
        el = PanelElement("s", ElementKind.SLIDER, (0.0, 0.0, 1.0, 0.2),
                          state={"value": value})
        img = compose_panel(make_doc([el]), (100, 50)).pixels
        cols = np.where((img[5] == SLIDER_KNOB).all(axis=1))[0]
        assert cols.size > 0
        return cols.mean()

    assert knob_x(0.0) < knob_x(0.5) < knob_x(1.0)
    assert knob_x(0.0) < 10 and knob_x(1.0) > 90


def test_label_glyph_boxes_skip_spaces():
    el = PanelElement("l", ElementKind.LABEL, (0.0, 0.0, 1.0, 1.0),
                      state={"text": "a b"})
    img = compose_panel(make_doc([el]), (40, 20)).pixels
    assert tuple(img[2, 2]) == INK                  # first glyph box
    assert tuple(img[2, 6]) == (60, 60, 70)         # space leaves the fill
    assert tuple(img[2, 10]) == INK                 # third character


def test_screen_requires_assets():
    el = PanelElement("s-1", ElementKind.SCREEN, (0.1, 0.1, 0.5, 0.5),
                      state={"sequence": "demo", "length": 2, "frame_index": 0})
    with pytest.raises(AssetMissing):
        compose_panel(make_doc([el]), (64, 48))
    with pytest.raises(AssetMissing):
        compose_panel(make_doc([el]), (64, 48), asset_root="/nonexistent")


def test_screen_blits_selected_frame(tmp_path, rng):
    seq = tmp_path / "demo"
    seq.mkdir()
    colors = [(255, 0, 0), (0, 255, 0)]
    for i, color in enumerate(colors):
        px = np.empty((4, 4, 3), dtype=np.uint8)
        px[:] = color
        write_ppm(Frame(px, 0.0), seq / f"{i:03d}.ppm")

    for idx, color in enumerate(colors):
        el = PanelElement("s-1", ElementKind.SCREEN, (0.0, 0.0, 0.5, 0.5),
                          state={"sequence": "demo", "length": 2, "frame_index": idx})
        img = compose_panel(make_doc([el]), (64, 64), asset_root=tmp_path).pixels
        assert tuple(img[16, 16]) == color
        assert tuple(img[48, 48]) == BACKGROUND

    el = PanelElement("s-1", ElementKind.SCREEN, (0.0, 0.0, 0.5, 0.5),
                      state={"sequence": "demo", "length": 2, "frame_index": 5})
    with pytest.raises(AssetMissing):
        compose_panel(make_doc([el]), (64, 64), asset_root=tmp_path)


def test_screen_scaling_preserves_quadrants(tmp_path):
    seq = tmp_path / "quads"
    seq.mkdir()
    px = np.zeros((2, 2, 3), dtype=np.uint8)
    px[0, 0] = (255, 0, 0)
    px[0, 1] = (0, 255, 0)
    px[1, 0] = (0, 0, 255)
    px[1, 1] = (255, 255, 0)
    write_ppm(Frame(px, 0.0), seq / "000.ppm")
    el = PanelElement("s-1", ElementKind.SCREEN, (0.0, 0.0, 1.0, 1.0),
                      state={"sequence": "quads", "length": 1, "frame_index": 0})
    img = compose_panel(make_doc([el]), (8, 8), asset_root=tmp_path).pixels
    assert tuple(img[1, 1]) == (255, 0, 0)
    assert tuple(img[1, 6]) == (0, 255, 0)
    assert tuple(img[6, 1]) == (0, 0, 255)
    assert tuple(img[6, 6]) == (255, 255, 0)


def test_compose_is_deterministic():
    doc = make_doc([PanelElement("b", ElementKind.BUTTON, (0.1, 0.2, 0.3, 0.2)),
                    PanelElement("s", ElementKind.SLIDER, (0.1, 0.5, 0.4, 0.1),
                                 state={"value": 0.3}, locked=True)])
    a = compose_panel(doc, (120, 90)).pixels
    b = compose_panel(doc, (120, 90)).pixels
    assert np.array_equal(a, b)


def test_compose_rejects_empty_resolution():
    with pytest.raises(ValueError):
        compose_panel(make_doc(), (0, 10))
