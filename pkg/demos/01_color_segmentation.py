# Track two fingertip markers in a synthetic camera frame.
#
# The scene renderer paints a dark room, a bright display surface, and
# round color markers. Segmentation pulls each marker out by its HSV band
# (the red band wraps the 0-degree hue seam on purpose), connected
# components drop stray pixels, and the min-area rectangle gives the
# subpixel center the tracker reports.

import numpy as np

from vip.pnm import write_pgm, write_ppm
from vip.raster import connected_components, min_area_rect, segment
from vip.synth import GREEN_RANGE, RED_RANGE, default_scene
from pathlib import Path

OUT = Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    scene = default_scene(320, 240)
    truth = {"index": (140.0, 130.0), "thumb": (205.5, 92.25)}
    frame = scene.render(truth, timestamp_ms=0.0)
    write_ppm(frame, OUT / "scene.ppm")

    for marker_id, band in (("index", RED_RANGE), ("thumb", GREEN_RANGE)):
        mask = segment(frame, band)
        comps = connected_components(mask)
        blob = max(comps, key=lambda c: c.area)
        rect = min_area_rect(blob.pixel_centers())
        ex, ey = truth[marker_id]
        err = float(np.hypot(rect.center[0] - ex, rect.center[1] - ey))
        print(f"{marker_id}: {len(comps)} blob(s), largest {blob.area} px, "
              f"center ({rect.center[0]:.2f}, {rect.center[1]:.2f}), "
              f"truth ({ex}, {ey}), error {err:.3f} px")
        write_pgm(mask, OUT / f"mask_{marker_id}.pgm")

    # hue outside both bands finds nothing
    from vip.raster import HsvRange
    empty = segment(frame, HsvRange(200.0, 260.0, 0.4, 1.0, 0.3, 1.0))
    print(f"blue band: {int((empty.values > 0).sum())} pixels (expected 0)")
    print(f"wrote scene.ppm and masks to {OUT}/")


if __name__ == "__main__":
    main()
