"""Virtual interactive prototyping workbench: vision, audio, gestures, panel."""

from .audio import AudioChunk, BandPassFilter, ClickEvent, ClickParams, band_pass, detect_clicks
from .edges import CannyParams, DisplayQuad, canny, extract_display_quad, to_gray
from .events import GestureEvent, GestureKind, Placed, Trigger
from .gestures import GestureParams, GestureState, step, to_panel_coords
from .panel import (BadDocument, Connection, CyclicGraph, ElementKind, PanelElement,
                    PrototypeDoc, UnknownElement, apply_gesture, evaluate_graph,
                    load_doc, save_doc)
from .pipeline import PipelineSession, SessionConfig, SessionEventLog, load_session_config, run_session
from .raster import BinaryMask, Frame, HsvColor, HsvRange, OrientedRect, connected_components, min_area_rect, segment
from .render import AffineTransform, compose_panel, fit_affine, warp_into
from .tracking import MarkerConfig, MarkerState, TapEvent, fuse_click, track_markers

__version__ = "0.1.0"
