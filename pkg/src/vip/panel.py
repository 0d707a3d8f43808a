"""The prototype document: palette, placed elements, dataflow wiring.

Documents are immutable snapshots; gesture application and graph evaluation
return new snapshots. Persistence is canonical JSON so identical documents
serialize to identical bytes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .events import Effect, GestureEvent, GestureKind, Placed, Trigger

DOC_VERSION = 1
MIN_ELEMENT_SIZE = 0.02


class ElementKind(Enum):
    BUTTON = "button"
    SCREEN = "screen"
    SLIDER = "slider"
    LABEL = "label"
    LOCK = "lock"


# dataflow port tables: name -> value type carried on the wire
_OUTLETS: dict[ElementKind, dict[str, str]] = {
    ElementKind.BUTTON: {"pressed": "pulse"},
    ElementKind.SLIDER: {"value": "scalar"},
}
_INLETS: dict[ElementKind, dict[str, str]] = {
    ElementKind.SCREEN: {"advance": "pulse", "jump": "scalar"},
    ElementKind.LABEL: {"text": "scalar"},
}

_STATE_KEYS: dict[ElementKind, set[str]] = {
    ElementKind.BUTTON: set(),
    ElementKind.SCREEN: {"sequence", "length", "frame_index"},
    ElementKind.SLIDER: {"value"},
    ElementKind.LABEL: {"text"},
    ElementKind.LOCK: set(),
}


class UnknownElement(KeyError):
    pass


class CyclicGraph(ValueError):
    pass


class BadDocument(ValueError):
    """Schema violation; `pointer` is the JSON pointer of the offending node."""

    def __init__(self, pointer: str, message: str = "invalid"):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


def default_state(kind: ElementKind) -> dict:
    if kind is ElementKind.SCREEN:
        return {"sequence": "", "length": 1, "frame_index": 0}
    if kind is ElementKind.SLIDER:
        return {"value": 0.5}
    if kind is ElementKind.LABEL:
        return {"text": ""}
    return {}


@dataclass(frozen=True)
class PanelElement:
    id: str
    kind: ElementKind
    bounds: tuple[float, float, float, float]   # (u, v, w, h) panel fractions
    locked: bool = False
    z: int = 0
    state: dict = field(default_factory=dict)
    # live pinch baseline (w, h); never serialized, never compared
    resize_baseline: tuple[float, float] | None = field(default=None, compare=False)

    @property
    def center(self) -> tuple[float, float]:
        u, v, w, h = self.bounds
        return (u + w / 2, v + h / 2)

    def contains(self, point: tuple[float, float], inflate: float = 0.0) -> bool:
        u, v, w, h = self.bounds
        du, dv = w * inflate, h * inflate
        return (u - du <= point[0] <= u + w + du
                and v - dv <= point[1] <= v + h + dv)


@dataclass(frozen=True)
class Connection:
    from_: tuple[str, str]      # (element id, outlet name)
    to: tuple[str, str]         # (element id, inlet name)


@dataclass(frozen=True)
class PrototypeDoc:
    elements: tuple[PanelElement, ...] = ()
    connections: tuple[Connection, ...] = ()
    mode: str = "edit"          # "edit" | "run"
    palette: tuple[PanelElement, ...] = ()
    inspector_open: bool = False

    def element(self, elem_id: str) -> PanelElement:
        for el in self.elements:
            if el.id == elem_id:
                return el
        raise UnknownElement(elem_id)

    def template(self, template_id: str) -> PanelElement:
        for el in self.palette:
            if el.id == template_id:
                return el
        raise UnknownElement(template_id)


def clamp_bounds(bounds, min_size: float = 0.0) -> tuple[float, float, float, float]:
    u, v, w, h = bounds
    w = min(max(w, min_size), 1.0)
    h = min(max(h, min_size), 1.0)
    u = min(max(u, 0.0), 1.0 - w)
    v = min(max(v, 0.0), 1.0 - h)
    return (u, v, w, h)


def generate_id(doc: PrototypeDoc, template_id: str) -> str:
    taken = {el.id for el in doc.elements}
    prefix = template_id + "-"
    highest = 0
    for eid in taken:
        if eid.startswith(prefix) and eid[len(prefix):].isdigit():
            highest = max(highest, int(eid[len(prefix):]))
    k = highest + 1
    while f"{template_id}-{k}" in taken:
        k += 1
    return f"{template_id}-{k}"


def _replace_element(doc: PrototypeDoc, elem_id: str, **changes) -> PrototypeDoc:
    found = False
    out = []
    for el in doc.elements:
        if el.id == elem_id:
            out.append(replace(el, **changes))
            found = True
        else:
            out.append(el)
    if not found:
        raise UnknownElement(elem_id)
    return replace(doc, elements=tuple(out))


def apply_gesture(doc: PrototypeDoc, ev: GestureEvent) -> tuple[PrototypeDoc, list[Effect]]:
    """Fold one gesture into the document; returns the new doc plus effects.

    Gestures that carry no document change (Scan, Select, DragEnd) return the
    document unchanged so callers can detect revisions by equality.
    """
    kind = ev.kind
    if kind in (GestureKind.SCAN, GestureKind.SELECT, GestureKind.DRAG_END):
        return doc, []

    if kind is GestureKind.PLACE:
        template = doc.template(ev.target)
        _, _, w, h = template.bounds
        bounds = clamp_bounds((ev.position[0], ev.position[1], w, h), MIN_ELEMENT_SIZE)
        top_z = max((el.z for el in doc.elements), default=0)
        new = PanelElement(
            id=generate_id(doc, ev.target),
            kind=template.kind,
            bounds=bounds,
            locked=False,
            z=top_z + 1,
            state=dict(template.state) or default_state(template.kind),
        )
        return replace(doc, elements=doc.elements + (new,)), [Placed(new.id)]

    if kind is GestureKind.DRAG_MOVE:
        el = doc.element(ev.target)
        _, _, w, h = el.bounds
        bounds = clamp_bounds((ev.position[0], ev.position[1], w, h))
        return _replace_element(doc, ev.target, bounds=bounds), []

    if kind is GestureKind.LOCK:
        doc.element(ev.target)
        return _replace_element(doc, ev.target, locked=True), []

    if kind is GestureKind.CLICK:
        doc.element(ev.target)
        if doc.mode == "run":
            return doc, [Trigger(ev.target)]
        return doc, []

    if kind is GestureKind.RESIZE_START:
        el = doc.element(ev.target)
        return _replace_element(doc, ev.target,
                                resize_baseline=el.bounds[2:4]), []

    if kind is GestureKind.RESIZE_MOVE:
        el = doc.element(ev.target)
        base_w, base_h = el.resize_baseline or el.bounds[2:4]
        cx, cy = el.center
        w = min(max(base_w * ev.scale, MIN_ELEMENT_SIZE), 1.0)
        h = min(max(base_h * ev.scale, MIN_ELEMENT_SIZE), 1.0)
        bounds = clamp_bounds((cx - w / 2, cy - h / 2, w, h), MIN_ELEMENT_SIZE)
        return _replace_element(doc, ev.target, bounds=bounds), []

    if kind is GestureKind.RESIZE_END:
        doc.element(ev.target)
        return _replace_element(doc, ev.target, resize_baseline=None), []

    if kind is GestureKind.WIPE_OPEN:
        return replace(doc, inspector_open=True), []
    if kind is GestureKind.WIPE_CLOSE:
        return replace(doc, inspector_open=False), []

    raise ValueError(f"unhandled gesture kind {kind}")


def toposort(node_ids, edges) -> list:
    """Kahn's algorithm preserving input order; raises CyclicGraph."""
    indegree = {n: 0 for n in node_ids}
    downstream: dict = {n: [] for n in node_ids}
    for src, dst in edges:
        downstream[src].append(dst)
        indegree[dst] += 1
    ready = [n for n in node_ids if indegree[n] == 0]
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for m in downstream[n]:
            indegree[m] -= 1
            if indegree[m] == 0:
                ready.append(m)
    if len(order) != len(node_ids):
        stuck = [n for n in node_ids if indegree[n] > 0]
        raise CyclicGraph(f"cycle through {stuck}")
    return order


def evaluate_graph(doc: PrototypeDoc, effects: list[Effect]) -> PrototypeDoc:
    """Propagate one tick of dataflow: pulses from triggered buttons and
    values from sliders flow along connections into screen/label inlets.

    A jump arrival overrides any advance pulses on the same screen in the
    same tick; among several scalar writers the last connection wins.
    """
    ids = [el.id for el in doc.elements]
    toposort(ids, [(c.from_[0], c.to[0]) for c in doc.connections])

    triggered = {e.target for e in effects if isinstance(e, Trigger)}
    by_id = {el.id: el for el in doc.elements}

    advance: dict[str, int] = {}
    jump: dict[str, float] = {}
    text: dict[str, float] = {}
    for conn in doc.connections:
        src = by_id[conn.from_[0]]
        port = conn.from_[1]
        if port == "pressed":
            if src.id not in triggered:
                continue
            value = None
        else:
            value = float(src.state["value"])
        dst_id, inlet = conn.to
        if inlet == "advance":
            advance[dst_id] = advance.get(dst_id, 0) + 1
        elif inlet == "jump":
            jump[dst_id] = value
        elif inlet == "text":
            text[dst_id] = value

    out = []
    for el in doc.elements:
        if el.kind is ElementKind.SCREEN and (el.id in jump or el.id in advance):
            state = dict(el.state)
            length = max(int(state["length"]), 1)
            if el.id in jump:
                state["frame_index"] = int(math.floor(jump[el.id] * (length - 1) + 0.5))
            else:
                state["frame_index"] = (int(state["frame_index"]) + advance[el.id]) % length
            out.append(replace(el, state=state))
        elif el.kind is ElementKind.LABEL and el.id in text:
            state = dict(el.state)
            state["text"] = f"{text[el.id]:.3f}"
            out.append(replace(el, state=state))
        else:
            out.append(el)
    return replace(doc, elements=tuple(out))


def set_locked(doc: PrototypeDoc, elem_id: str, locked: bool) -> PrototypeDoc:
    return _replace_element(doc, elem_id, locked=locked)


def add_connection(doc: PrototypeDoc, from_pair, to_pair) -> PrototypeDoc:
    """Wire an outlet to an inlet, enforcing port validity and acyclicity."""
    conn = Connection(tuple(from_pair), tuple(to_pair))
    n = len(doc.connections)
    _check_connection(doc.elements, conn, f"/connections/{n}")
    new = replace(doc, connections=doc.connections + (conn,))
    toposort([el.id for el in new.elements],
             [(c.from_[0], c.to[0]) for c in new.connections])
    return new


# ---------------------------------------------------------------- persistence

def _element_to_json(el: PanelElement) -> dict:
    return {
        "id": el.id,
        "kind": el.kind.value,
        "bounds": list(el.bounds),
        "locked": el.locked,
        "z": el.z,
        "state": el.state,
    }


def save_doc(doc: PrototypeDoc) -> bytes:
    data = {
        "version": DOC_VERSION,
        "mode": doc.mode,
        "inspector_open": doc.inspector_open,
        "palette": [_element_to_json(el) for el in doc.palette],
        "elements": [_element_to_json(el) for el in doc.elements],
        "connections": [{"from": list(c.from_), "to": list(c.to)} for c in doc.connections],
    }
    return json.dumps(data, sort_keys=True, separators=(",", ":")).encode()


def _require(data: dict, key: str, types, pointer: str):
    if key not in data:
        raise BadDocument(f"{pointer}/{key}", "missing")
    value = data[key]
    if not isinstance(value, types) or isinstance(value, bool) and bool not in (
            types if isinstance(types, tuple) else (types,)):
        raise BadDocument(f"{pointer}/{key}", "wrong type")
    return value


def _parse_element(data, pointer: str) -> PanelElement:
    if not isinstance(data, dict):
        raise BadDocument(pointer, "expected object")
    elem_id = _require(data, "id", str, pointer)
    kind_name = _require(data, "kind", str, pointer)
    try:
        kind = ElementKind(kind_name)
    except ValueError:
        raise BadDocument(f"{pointer}/kind", f"unknown kind {kind_name!r}") from None
    bounds = _require(data, "bounds", list, pointer)
    if len(bounds) != 4 or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                   for x in bounds):
        raise BadDocument(f"{pointer}/bounds", "expected four numbers")
    locked = _require(data, "locked", bool, pointer)
    z = _require(data, "z", int, pointer)
    state = _require(data, "state", dict, pointer)
    if set(state.keys()) != _STATE_KEYS[kind]:
        raise BadDocument(f"{pointer}/state", f"state keys must be {sorted(_STATE_KEYS[kind])}")
    if kind is ElementKind.SCREEN:
        if not isinstance(state["sequence"], str):
            raise BadDocument(f"{pointer}/state/sequence", "expected string")
        length = state["length"]
        if not isinstance(length, int) or isinstance(length, bool) or length < 1:
            raise BadDocument(f"{pointer}/state/length", "expected integer >= 1")
        fi = state["frame_index"]
        if not isinstance(fi, int) or isinstance(fi, bool) or not 0 <= fi < length:
            raise BadDocument(f"{pointer}/state/frame_index", "out of range")
    elif kind is ElementKind.SLIDER:
        value = state["value"]
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not 0 <= value <= 1:
            raise BadDocument(f"{pointer}/state/value", "expected number in [0,1]")
        state = {"value": float(value)}
    elif kind is ElementKind.LABEL:
        if not isinstance(state["text"], str):
            raise BadDocument(f"{pointer}/state/text", "expected string")
    extra = set(data.keys()) - {"id", "kind", "bounds", "locked", "z", "state"}
    if extra:
        raise BadDocument(f"{pointer}/{sorted(extra)[0]}", "unknown key")
    return PanelElement(elem_id, kind, clamp_bounds(tuple(float(x) for x in bounds)),
                        locked, z, dict(state))


def _check_connection(elements, conn: Connection, pointer: str) -> None:
    by_id = {el.id: el for el in elements}

    def end(pair, port_table, leg):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2
                and all(isinstance(x, str) for x in pair)):
            raise BadDocument(f"{pointer}/{leg}", "expected [element id, port name]")
        elem_id, port = pair
        if elem_id not in by_id:
            raise BadDocument(f"{pointer}/{leg}", f"no element {elem_id!r}")
        ports = port_table.get(by_id[elem_id].kind, {})
        if port not in ports:
            raise BadDocument(f"{pointer}/{leg}", f"no port {port!r} on {by_id[elem_id].kind.value}")
        return ports[port]

    src_type = end(conn.from_, _OUTLETS, "from")
    dst_type = end(conn.to, _INLETS, "to")
    if src_type != dst_type:
        raise BadDocument(f"{pointer}/to", f"cannot feed {src_type} into {dst_type}")


def load_doc(raw: bytes) -> PrototypeDoc:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise BadDocument("", f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise BadDocument("", "expected top-level object")
    if data.get("version") != DOC_VERSION:
        raise BadDocument("/version", f"expected {DOC_VERSION}")
    mode = _require(data, "mode", str, "")
    if mode not in ("edit", "run"):
        raise BadDocument("/mode", "expected 'edit' or 'run'")
    inspector = data.get("inspector_open", False)
    if not isinstance(inspector, bool):
        raise BadDocument("/inspector_open", "expected boolean")

    palette = tuple(_parse_element(entry, f"/palette/{i}")
                    for i, entry in enumerate(_require(data, "palette", list, "")))
    if sum(1 for el in palette if el.kind is ElementKind.LOCK) != 1:
        raise BadDocument("/palette", "exactly one lock control required")
    seen: set[str] = set()
    for i, el in enumerate(palette):
        if el.id in seen:
            raise BadDocument(f"/palette/{i}/id", "duplicate id")
        seen.add(el.id)

    elements = tuple(_parse_element(entry, f"/elements/{i}")
                     for i, entry in enumerate(_require(data, "elements", list, "")))
    seen = set()
    for i, el in enumerate(elements):
        if el.id in seen:
            raise BadDocument(f"/elements/{i}/id", "duplicate id")
        seen.add(el.id)

    raw_conns = _require(data, "connections", list, "")
    connections = []
    for i, entry in enumerate(raw_conns):
        if not isinstance(entry, dict) or set(entry.keys()) != {"from", "to"}:
            raise BadDocument(f"/connections/{i}", "expected {from, to}")
        conn = Connection(tuple(entry["from"]) if isinstance(entry["from"], list) else entry["from"],
                          tuple(entry["to"]) if isinstance(entry["to"], list) else entry["to"])
        _check_connection(elements, conn, f"/connections/{i}")
        connections.append(conn)

    doc = PrototypeDoc(elements, tuple(connections), mode, palette, inspector)
    toposort([el.id for el in doc.elements],
             [(c.from_[0], c.to[0]) for c in doc.connections])
    return doc
