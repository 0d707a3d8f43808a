"""Minimal PNG encoding: 8-bit RGB, filter 0 rows, one IDAT chunk."""
from __future__ import annotations

import struct
import zlib

import numpy as np

from .raster import Frame

_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _chunk(tag: bytes, data: bytes) -> bytes:
    return (struct.pack(">I", len(data)) + tag + data
            + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF))


def png_bytes(frame: Frame) -> bytes:
    h, w = frame.pixels.shape[:2]
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    rows = np.concatenate([np.zeros((h, 1), dtype=np.uint8),
                           frame.pixels.reshape(h, w * 3)], axis=1)
    idat = zlib.compress(rows.tobytes(), 6)
    return _SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")
