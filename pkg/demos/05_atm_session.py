# A cash machine mock-up, end to end from recorded inputs.
#
# The fixture is built on the fly: a frame sequence where a fingertip
# marker rests on keypad buttons, a WAV with three tap bursts, a document
# wiring three keys into a screen's advance inlet and a slider into a
# readout label. Running the session replays it deterministically; the
# same inputs always produce byte-identical event logs.

import json
import numpy as np

from vip.audio import write_wav
from vip.edges import DisplayQuad
from vip.gestures import panel_to_frame
from vip.panel import (Connection, ElementKind, PanelElement, PrototypeDoc,
                       save_doc)
from vip.pipeline import SessionConfig, run_session
from vip.pnm import Frame, write_frame_stream, write_ppm
from vip.raster import HsvRange
from vip.synth import GREEN_RANGE, RED_RANGE, default_scene, taps_track
from vip.tracking import MarkerConfig
from pathlib import Path

from _shared import standard_palette

OUT = Path(__file__).parent / "out" / "atm"


def atm_doc() -> PrototypeDoc:
    els = [PanelElement("screen-1", ElementKind.SCREEN, (0.30, 0.05, 0.40, 0.35),
                        locked=True,
                        state={"sequence": "atm", "length": 4, "frame_index": 0})]
    for i, u in enumerate((0.10, 0.40, 0.70), start=1):
        els.append(PanelElement(f"key-{i}", ElementKind.BUTTON,
                                (u, 0.50, 0.20, 0.15), locked=True))
    els.append(PanelElement("amount", ElementKind.SLIDER, (0.10, 0.75, 0.50, 0.08),
                            locked=True, state={"value": 0.5}))
    els.append(PanelElement("readout", ElementKind.LABEL, (0.65, 0.75, 0.25, 0.08),
                            locked=True, state={"text": ""}))
    conns = tuple(Connection((f"key-{i}", "pressed"), ("screen-1", "advance"))
                  for i in (1, 2, 3))
    conns += (Connection(("amount", "value"), ("readout", "text")),)
    return PrototypeDoc(tuple(els), conns, "edit", standard_palette())


def build_fixture(root: Path) -> SessionConfig:
    scene = default_scene(160, 120)
    quad = DisplayQuad(np.array(scene.quad))
    seq = root / "assets" / "atm"
    seq.mkdir(parents=True, exist_ok=True)
    for i in range(4):   # four screen states, distinct colors
        px = np.zeros((48, 64, 3), dtype=np.uint8)
        px[:, :, i % 3] = 90 + 50 * i
        write_ppm(Frame(px, 0.0), seq / f"{i:03d}.ppm")
    (root / "doc.json").write_bytes(save_doc(atm_doc()))

    key1 = panel_to_frame((0.20, 0.575), quad)   # center of key-1
    key3 = panel_to_frame((0.80, 0.575), quad)   # center of key-3
    frames = []
    for i in range(13):
        pos = {"index": key1} if i <= 7 else {} if i <= 9 else {"index": key3}
        frames.append(scene.render(pos, timestamp_ms=40.0 * (i + 1)))
    write_frame_stream(root / "frames", frames)
    # two taps on key-1, one on key-3, comfortably past the debounce
    write_wav(taps_track([80.0, 280.0, 480.0], total_ms=600.0), root / "taps.wav")

    return SessionConfig(
        doc_path=root / "doc.json",
        markers=(MarkerConfig("index", RED_RANGE, min_area=15),
                 MarkerConfig("thumb", GREEN_RANGE, min_area=15)),
        frame_dir=root / "frames", audio_wav=root / "taps.wav",
        render_resolution=(80, 60), asset_root=root / "assets",
        mode_script=((0, "run"),),
    )


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    config = build_fixture(OUT)
    log = run_session(config)
    log.write(OUT / "events.jsonl")

    print(f"{len(log.records)} ticks:")
    for r in log.records:
        marks = " ".join(f"{g['kind']}:{g['target']}" for g in r["gestures"])
        print(f"  tick {r['tick']:2d}  t={r['timestamp_ms']:5.0f} ms  "
              f"rev {r['doc_revision']}  {marks or '-'}")

    rerun = run_session(config)
    print(f"replay determinism: {'byte-identical' if rerun.to_jsonl() == log.to_jsonl() else 'DIVERGED'}")
    final_screen = json.loads((OUT / "events.jsonl").read_text().splitlines()[-1])
    print(f"final revision {final_screen['doc_revision']}, "
          f"log written to {OUT / 'events.jsonl'}")


if __name__ == "__main__":
    main()
