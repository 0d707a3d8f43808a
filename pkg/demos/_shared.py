"""Bits shared by the demo scripts: a small starter document."""

from vip.panel import ElementKind, PanelElement, PrototypeDoc, default_state


def standard_palette() -> tuple[PanelElement, ...]:
    kinds = (ElementKind.BUTTON, ElementKind.SCREEN, ElementKind.SLIDER,
             ElementKind.LABEL, ElementKind.LOCK)
    return tuple(
        PanelElement(kind.value, kind, (0.0, 0.0, 0.18, 0.10),
                     state=default_state(kind))
        for kind in kinds)


def demo_doc() -> PrototypeDoc:
    elements = (
        PanelElement("button-1", ElementKind.BUTTON, (0.10, 0.15, 0.30, 0.20),
                     locked=True),
        PanelElement("label-1", ElementKind.LABEL, (0.55, 0.60, 0.35, 0.15),
                     state={"text": "ready"}),
    )
    return PrototypeDoc(elements=elements, palette=standard_palette())
