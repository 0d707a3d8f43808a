"""Command line entry points: session running/serving plus per-stage debugging."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .audio import ClickParams, band_pass, read_wav
from .edges import CannyParams, canny, to_gray
from .pipeline import load_session_config, run_session
from .pnm import read_ppm, write_pgm, write_ppm
from .raster import HsvRange, segment
from .render import compose_panel
from .panel import load_doc
from . import audio as _audio
from . import service as _service


def _span(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return (float(lo), float(hi))


def _cmd_run(args) -> int:
    config = load_session_config(args.session)
    log = run_session(config)
    if args.out:
        log.write(args.out)
    else:
        sys.stdout.buffer.write(log.to_jsonl())
    return 0


def _cmd_serve(args) -> int:
    config = load_session_config(args.session)
    _service.serve(config, args.port, args.host)
    return 0


def _cmd_segment(args) -> int:
    frame = read_ppm(args.image)
    hue = _span(args.hue)
    sat = _span(args.sat)
    val = _span(args.val)
    rng = HsvRange(hue[0], hue[1], sat[0], sat[1], val[0], val[1])
    write_pgm(segment(frame, rng), args.out)
    return 0


def _cmd_edges(args) -> int:
    frame = read_ppm(args.image)
    params = CannyParams(sigma=args.sigma, t_high=args.t_high, ratio=args.ratio)
    write_pgm(canny(to_gray(frame), params), args.out)
    return 0


def _cmd_clicks(args) -> int:
    chunk = read_wav(args.wav)
    params = ClickParams(f_low=args.f_low, f_high=args.f_high,
                         level_threshold=args.threshold, window=args.window,
                         debounce_ms=args.debounce)
    filtered = band_pass(chunk, params.f_low, params.f_high)
    for click in _audio.detect_clicks([filtered], params, chunk.sample_rate):
        print(json.dumps({"time_ms": round(click.time_ms, 6),
                          "peak_level": round(click.peak_level, 6)},
                         sort_keys=True, separators=(",", ":")))
    return 0


def _cmd_render(args) -> int:
    doc = load_doc(Path(args.doc).read_bytes())
    w, _, h = args.resolution.partition("x")
    assets = args.assets if args.assets else Path(args.doc).parent
    frame = compose_panel(doc, (int(w), int(h)), assets)
    write_ppm(frame, args.out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vip",
                                     description="virtual interactive prototyping workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a file-driven session, emit the event log")
    p.add_argument("session", help="session JSON file")
    p.add_argument("--out", help="write JSON lines here instead of stdout")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("serve", help="serve a wire-driven session over WebSocket")
    p.add_argument("session")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("segment", help="HSV-segment a PPM image into a PGM mask")
    p.add_argument("image")
    p.add_argument("--hue", default="350:10", help="degrees, lo:hi (wraps when lo > hi)")
    p.add_argument("--sat", default="0.4:1.0")
    p.add_argument("--val", default="0.3:1.0")
    p.add_argument("--out", default="mask.pgm")
    p.set_defaults(fn=_cmd_segment)

    p = sub.add_parser("edges", help="edge-detect a PPM image into a PGM mask")
    p.add_argument("image")
    p.add_argument("--sigma", type=float, default=1.4)
    p.add_argument("--t-high", type=float, default=0.2, dest="t_high")
    p.add_argument("--ratio", type=float, default=2.5)
    p.add_argument("--out", default="edges.pgm")
    p.set_defaults(fn=_cmd_edges)

    p = sub.add_parser("clicks", help="detect taps in a WAV file, emit JSON lines")
    p.add_argument("wav")
    p.add_argument("--threshold", type=float, default=0.15)
    p.add_argument("--f-low", type=float, default=800.0, dest="f_low")
    p.add_argument("--f-high", type=float, default=4000.0, dest="f_high")
    p.add_argument("--window", type=int, default=256)
    p.add_argument("--debounce", type=float, default=150.0)
    p.set_defaults(fn=_cmd_clicks)

    p = sub.add_parser("render", help="compose a document into a PPM image")
    p.add_argument("doc")
    p.add_argument("--resolution", default="320x240")
    p.add_argument("--assets", help="image sequence root, defaults to the doc directory")
    p.add_argument("--out", default="panel.ppm")
    p.set_defaults(fn=_cmd_render)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
