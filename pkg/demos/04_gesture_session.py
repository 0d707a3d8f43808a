"""Walk the gesture layer through a full authoring loop.

One tracked fingertip plus tap sounds is enough to build a working
control: pick a template off the palette strip, tap the panel to drop
it, lock it, flip to run mode, and tap it to fire. Each step below feeds
the state machine one tick and prints what came out.
"""

from vip.events import GestureKind
from vip.gestures import (GestureState, note_placed, palette_layout,
                          panel_to_frame, step)
from vip.panel import apply_gesture
from vip.tracking import MarkerState, TapEvent
from vip.edges import DisplayQuad
import numpy as np

from _shared import standard_palette
from vip.panel import PrototypeDoc

FRAME = (640, 480)
QUAD = DisplayQuad(np.array([[160.0, 40.0], [160.0, 440.0],
                             [560.0, 440.0], [560.0, 40.0]]))


def tick(state, doc, pos, tap_at=None, time_ms=0.0):
    markers = [MarkerState("index", pos)]
    tap = TapEvent(time_ms, tap_at, "index") if tap_at is not None else None
    state, events = step(state, doc, markers, tap, QUAD, FRAME)
    for ev in events:
        doc, effects = apply_gesture(doc, ev)
        extra = f" at {ev.position}" if ev.position else ""
        print(f"  -> {ev.kind.value} target={ev.target!r}{extra}")
        for effect in effects:
            state = note_placed(state, effect.target)
    return state, doc


def main():
    doc = PrototypeDoc(palette=standard_palette())
    state = GestureState(mode=doc.mode)
    slots = palette_layout(FRAME, len(doc.palette))
    slot_center = lambda i: ((slots[i][0] + slots[i][2]) / 2,
                             (slots[i][1] + slots[i][3]) / 2)

    print("tap the button template on the palette strip:")
    state, doc = tick(state, doc, slot_center(0), tap_at=slot_center(0))

    print("tap the panel to place it:")
    drop = panel_to_frame((0.5, 0.4), QUAD)
    state, doc = tick(state, doc, drop, tap_at=drop, time_ms=300.0)
    placed = doc.elements[-1]
    print(f"  doc now has {placed.id!r} at bounds "
          f"({placed.bounds[0]:.2f}, {placed.bounds[1]:.2f}, "
          f"{placed.bounds[2]:.2f}, {placed.bounds[3]:.2f})")

    print("tap the lock control (acts on the element in focus):")
    state, doc = tick(state, doc, slot_center(4), tap_at=slot_center(4), time_ms=600.0)
    print(f"  {placed.id!r} locked: {doc.element(placed.id).locked}")

    print("switch to run mode and tap the new button:")
    doc = PrototypeDoc(doc.elements, doc.connections, "run", doc.palette,
                       doc.inspector_open)
    target = panel_to_frame(doc.element(placed.id).center, QUAD)
    state, doc = tick(state, doc, target, tap_at=target, time_ms=900.0)

    print("hover without tapping (feedback only, nothing fires):")
    state, doc = tick(state, doc, panel_to_frame((0.52, 0.42), QUAD), time_ms=940.0)


if __name__ == "__main__":
    main()
