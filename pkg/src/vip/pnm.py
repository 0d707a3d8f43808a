"""Binary PPM (P6) / PGM (P5) files and directory-based frame streams.

A frame stream is a directory of zero-padded numbered PPM files plus a
``manifest.json`` listing each file with its timestamp in milliseconds.
"""
from __future__ import annotations

import io
import json
from pathlib import Path
from typing import Iterator

import numpy as np

from .raster import BinaryMask, Frame

MANIFEST_NAME = "manifest.json"


def ppm_bytes(frame: Frame) -> bytes:
    return b"P6\n%d %d\n255\n" % (frame.width, frame.height) + frame.pixels.tobytes()


def parse_ppm(data: bytes, timestamp_ms: float = 0) -> Frame:
    magic, (w, h), maxval, body = _read_pnm_body(io.BytesIO(data))
    if magic != b"P6" or maxval != 255:
        raise ValueError("expected P6 ppm with maxval 255")
    px = np.frombuffer(body, dtype=np.uint8, count=w * h * 3).reshape(h, w, 3)
    return Frame(px.copy(), timestamp_ms)


def write_ppm(frame: Frame, path) -> None:
    with open(path, "wb") as f:
        f.write(ppm_bytes(frame))


def read_ppm(path, timestamp_ms: int = 0) -> Frame:
    with open(path, "rb") as f:
        magic, (w, h), maxval, data = _read_pnm_body(f)
    if magic != b"P6":
        raise ValueError(f"{path}: expected P6 ppm, got {magic!r}")
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported")
    px = np.frombuffer(data, dtype=np.uint8, count=w * h * 3).reshape(h, w, 3)
    return Frame(px.copy(), timestamp_ms)


def write_pgm(mask: BinaryMask, path) -> None:
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (mask.width, mask.height))
        f.write(mask.values.tobytes())


def read_pgm(path) -> BinaryMask:
    with open(path, "rb") as f:
        magic, (w, h), maxval, data = _read_pnm_body(f)
    if magic != b"P5":
        raise ValueError(f"{path}: expected P5 pgm, got {magic!r}")
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported")
    v = np.frombuffer(data, dtype=np.uint8, count=w * h).reshape(h, w)
    return BinaryMask(v.copy())


def _read_pnm_body(f):
    magic = f.read(2)
    fields: list[int] = []
    while len(fields) < 3:
        tok = _next_token(f)
        fields.append(int(tok))
    w, h, maxval = fields
    data = f.read()
    return magic, (w, h), maxval, data


def _next_token(f) -> bytes:
    # whitespace-separated header tokens, '#' comments run to end of line
    tok = b""
    while True:
        c = f.read(1)
        if c == b"":
            raise ValueError("truncated pnm header")
        if c == b"#":
            while c not in (b"\n", b""):
                c = f.read(1)
            continue
        if c.isspace():
            if tok:
                return tok
            continue
        tok += c


class FrameStream:
    """Reader for a manifest-described directory of PPM frames."""

    def __init__(self, directory):
        self.directory = Path(directory)
        manifest_path = self.directory / MANIFEST_NAME
        with open(manifest_path, "r", encoding="utf-8") as f:
            manifest = json.load(f)
        self.entries = manifest["frames"]
        times = [e["timestamp_ms"] for e in self.entries]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"{manifest_path}: timestamps must strictly increase")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def timestamps_ms(self) -> list[int]:
        return [e["timestamp_ms"] for e in self.entries]

    def __iter__(self) -> Iterator[Frame]:
        for e in self.entries:
            yield read_ppm(self.directory / e["file"], e["timestamp_ms"])


def write_frame_stream(directory, frames: list[Frame]) -> None:
    """Write frames as 000000.ppm, 000001.ppm, ... plus the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, frame in enumerate(frames):
        name = f"{i:06d}.ppm"
        write_ppm(frame, directory / name)
        entries.append({"file": name, "timestamp_ms": frame.timestamp_ms})
    manifest = {"version": 1, "frames": entries}
    with open(directory / MANIFEST_NAME, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
