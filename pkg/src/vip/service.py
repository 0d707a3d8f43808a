"""WebSocket service: one UI client drives a session over the wire.

Messages travel as JSON text frames in a versioned envelope
{"v": 1, "type": ..., "payload": {...}}. The full wire contract lives in
protocol.md at the repository root.
"""
from __future__ import annotations

import asyncio
import base64
import json
import logging
from pathlib import Path

import numpy as np
from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .audio import AudioChunk
from .events import GestureEvent, GestureKind
from .gestures import palette_layout
from .panel import (BadDocument, CyclicGraph, UnknownElement, add_connection,
                    apply_gesture, load_doc, save_doc, set_locked)
from .pipeline import AudioIngest, PipelineSession, SessionConfig
from .png import png_bytes
from .pnm import ppm_bytes
from .render import compose_panel
from .synth import SynthScene, default_scene, tap_burst

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
TICK_MS = 40
AUDIO_RATE = 16000
CLOSE_VERSION_MISMATCH = 4001
CLOSE_SESSION_BUSY = 4002


def _envelope(msg_type: str, payload: dict) -> str:
    return json.dumps({"v": PROTOCOL_VERSION, "type": msg_type, "payload": payload},
                      sort_keys=True, separators=(",", ":"))


class WorkbenchService:
    """Session state shared across (re)connections; one client at a time."""

    def __init__(self, config: SessionConfig, scene: SynthScene | None = None):
        doc = load_doc(Path(config.doc_path).read_bytes())
        self.config = config
        self.session = PipelineSession(doc, config)
        self.scene = scene if scene is not None else default_scene()
        self.audio = AudioIngest(config.click_params, AUDIO_RATE)
        self.tap_pending = False
        self.client = None
        self.image_format = "ppm"
        self.last_sent_revision = -1

    # ------------------------------------------------------------- plumbing

    async def _send(self, ws, msg_type: str, payload: dict) -> None:
        await ws.send(_envelope(msg_type, payload))

    def _hello_payload(self) -> dict:
        w, h = self.scene.frame_size
        return {
            "formats": ["ppm", "png"],
            "format": self.image_format,
            "tick_ms": TICK_MS,
            "frame_size": [w, h],
            "render_resolution": list(self.config.render_resolution),
            "markers": sorted(self.scene.markers.keys()),
        }

    def _doc_payload(self) -> dict:
        doc = self.session.doc
        return {
            "revision": self.session.revision,
            "doc": json.loads(save_doc(doc).decode()),
            "palette_layout": [list(r) for r in
                               palette_layout(self.scene.frame_size, len(doc.palette))],
        }

    def _panel_payload(self) -> dict:
        composite = compose_panel(self.session.doc, self.config.render_resolution,
                                  self.config.asset_root)
        data = png_bytes(composite) if self.image_format == "png" else ppm_bytes(composite)
        return {
            "revision": self.session.revision,
            "format": self.image_format,
            "width": composite.width,
            "height": composite.height,
            "data": base64.b64encode(data).decode(),
        }

    async def _broadcast_doc_state(self, ws) -> None:
        if self.session.revision != self.last_sent_revision:
            await self._send(ws, "doc", self._doc_payload())
            await self._send(ws, "panel", self._panel_payload())
            self.last_sent_revision = self.session.revision

    # ------------------------------------------------------------- handlers

    async def handle(self, ws) -> None:
        if self.client is not None:
            await self._send(ws, "error", {"message": "session busy"})
            await ws.close(CLOSE_SESSION_BUSY, "session busy")
            return
        self.client = ws
        try:
            await self._send(ws, "hello", self._hello_payload())
            await self._send(ws, "doc", self._doc_payload())
            await self._send(ws, "panel", self._panel_payload())
            self.last_sent_revision = self.session.revision
            async for raw in ws:
                await self._dispatch(ws, raw)
        except ConnectionClosed:
            pass
        finally:
            self.client = None

    async def _dispatch(self, ws, raw) -> None:
        try:
            msg = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            await self._send(ws, "error", {"message": "not valid JSON"})
            return
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            await self._send(ws, "error", {"message": "expected {v, type, payload}"})
            return
        if msg.get("v") != PROTOCOL_VERSION:
            await ws.close(CLOSE_VERSION_MISMATCH,
                           f"protocol version {msg.get('v')} unsupported")
            return
        handler = getattr(self, "_on_" + msg["type"], None)
        if handler is None:
            await self._send(ws, "error", {"message": f"unknown type {msg['type']!r}"})
            return
        try:
            await handler(ws, msg.get("payload") or {})
        except (BadDocument, CyclicGraph) as exc:
            payload = {"message": str(exc)}
            if isinstance(exc, BadDocument):
                payload["pointer"] = exc.pointer
            await self._send(ws, "error", payload)
        except (UnknownElement, KeyError, ValueError, TypeError, IndexError) as exc:
            await self._send(ws, "error", {"message": f"malformed payload: {exc!r}"})

    async def _on_hello(self, ws, payload: dict) -> None:
        wanted = payload.get("formats", [])
        if isinstance(wanted, list) and "png" in wanted:
            self.image_format = "png"
        await self._send(ws, "hello", self._hello_payload())

    async def _on_synthetic_frame(self, ws, payload: dict) -> None:
        positions = {}
        for marker_id in self.scene.markers:
            pos = payload.get("markers", {}).get(marker_id)
            positions[marker_id] = (float(pos[0]), float(pos[1])) if pos is not None else None

        timestamp = (self.session.tick_index + 1) * TICK_MS
        frame = self.scene.render(positions, timestamp)

        samples = np.zeros(AUDIO_RATE * TICK_MS // 1000)
        if self.tap_pending:
            burst = tap_burst(sample_rate=AUDIO_RATE)
            samples[:len(burst)] += burst[:len(samples)]
            self.tap_pending = False
        clicks = self.audio.feed(AudioChunk(samples, AUDIO_RATE, timestamp))

        result = self.session.tick(frame, clicks)
        await self._send(ws, "tick", result.record)
        await self._broadcast_doc_state(ws)

    async def _on_synthetic_tap(self, ws, payload: dict) -> None:
        self.tap_pending = True

    async def _on_mode_change(self, ws, payload: dict) -> None:
        self.session.set_mode(payload["mode"])
        await self._broadcast_doc_state(ws)

    async def _on_doc_edit(self, ws, payload: dict) -> None:
        if self.session.doc.mode != "edit":
            await self._send(ws, "error", {"message": "document is read-only in run mode"})
            return
        action = payload.get("action")
        doc = self.session.doc
        if action == "place":
            pos = payload["position"]
            doc, _ = apply_gesture(doc, GestureEvent(
                GestureKind.PLACE, payload["template"], (float(pos[0]), float(pos[1]))))
        elif action == "move":
            pos = payload["position"]
            doc, _ = apply_gesture(doc, GestureEvent(
                GestureKind.DRAG_MOVE, payload["element"], (float(pos[0]), float(pos[1]))))
        elif action == "lock":
            doc = set_locked(doc, payload["element"], bool(payload.get("locked", True)))
        elif action == "connect":
            doc = add_connection(doc, payload["from"], payload["to"])
        else:
            await self._send(ws, "error", {"message": f"unknown edit action {action!r}"})
            return
        if doc != self.session.doc:
            self.session.doc = doc
            self.session.revision += 1
        await self._broadcast_doc_state(ws)

    async def _on_get_doc(self, ws, payload: dict) -> None:
        await self._send(ws, "doc", self._doc_payload())

    async def _on_get_panel(self, ws, payload: dict) -> None:
        await self._send(ws, "panel", self._panel_payload())


async def serve_async(config: SessionConfig, port: int, host: str = "127.0.0.1"):
    """Run the service until cancelled; port 0 picks an ephemeral port."""
    service = WorkbenchService(config)
    async with ws_serve(service.handle, host, port) as server:
        bound = server.sockets[0].getsockname()[1] if server.sockets else port
        log.info("serving on ws://%s:%d", host, bound)
        await asyncio.get_running_loop().create_future()


def serve(config: SessionConfig, port: int, host: str = "127.0.0.1") -> None:
    """Blocking entry point used by the CLI."""
    try:
        asyncio.run(serve_async(config, port, host))
    except KeyboardInterrupt:
        pass
