"""Find the display surface in a frame and pin the panel onto it.

Edge detection runs the classic chain: gaussian blur, gradients,
non-maximum suppression, double-threshold hysteresis. The largest closed
contour that simplifies to four corners becomes the display quad; an
affine map then drops a rendered panel into the quad so it moves with
the tracked object.
"""

import numpy as np

from vip.edges import CannyParams, canny, extract_display_quad, to_gray
from vip.pnm import write_pgm, write_ppm
from vip.render import compose_panel, fit_affine, warp_into
from vip.synth import default_scene
from pathlib import Path

from _shared import demo_doc

OUT = Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    scene = default_scene(320, 240)
    frame = scene.render({}, timestamp_ms=0.0)

    edges = canny(to_gray(frame), CannyParams())
    write_pgm(edges, OUT / "edges.pgm")
    print(f"edge pixels: {int((edges.values > 0).sum())}")

    quad = extract_display_quad(edges, None)
    assert quad is not None, "display not found"
    truth = np.array(scene.quad)
    err = np.abs(quad.corners - truth).max()
    print("detected corners (TL BL BR TR):")
    for corner, true_corner in zip(quad.corners, truth):
        print(f"  ({corner[0]:7.2f}, {corner[1]:7.2f})   truth "
              f"({true_corner[0]:7.2f}, {true_corner[1]:7.2f})")
    print(f"worst corner error: {err:.2f} px, confidence {quad.confidence}")

    doc = demo_doc()
    composite = compose_panel(doc, (96, 72), OUT)
    t = fit_affine((composite.width, composite.height), quad.tl, quad.tr, quad.bl)
    overlaid = warp_into(composite, t, frame)
    write_ppm(overlaid, OUT / "overlay.ppm")
    print(f"wrote edges.pgm and overlay.ppm to {OUT}/")


if __name__ == "__main__":
    main()
