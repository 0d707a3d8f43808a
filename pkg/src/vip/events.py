"""Gesture events and document effects shared across the engine modules."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class GestureKind(Enum):
    SCAN = "scan"
    SELECT = "select"
    PLACE = "place"
    DRAG_MOVE = "drag_move"
    DRAG_END = "drag_end"
    LOCK = "lock"
    CLICK = "click"
    RESIZE_START = "resize_start"
    RESIZE_MOVE = "resize_move"
    RESIZE_END = "resize_end"
    WIPE_OPEN = "wipe_open"
    WIPE_CLOSE = "wipe_close"


# target value when a gesture addresses the panel surface, not an element
SURFACE = "surface"


@dataclass(frozen=True)
class GestureEvent:
    kind: GestureKind
    target: str
    position: tuple[float, float] | None = None
    scale: float | None = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value, "target": self.target}
        if self.position is not None:
            out["position"] = [round(self.position[0], 6), round(self.position[1], 6)]
        if self.scale is not None:
            out["scale"] = round(self.scale, 6)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "GestureEvent":
        pos = data.get("position")
        return cls(
            kind=GestureKind(data["kind"]),
            target=data["target"],
            position=tuple(pos) if pos is not None else None,
            scale=data.get("scale"),
        )


@dataclass(frozen=True)
class Trigger:
    """A locked element was clicked in run mode; its outlet should pulse."""

    target: str


@dataclass(frozen=True)
class Placed:
    """A new element entered the document; carries the generated id."""

    target: str


Effect = Trigger | Placed
