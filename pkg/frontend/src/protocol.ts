// Wire types for the workbench protocol (see protocol.md at the repo root).
// Every frame in either direction is one JSON envelope {v, type, payload}.

export const PROTOCOL_VERSION = 1;

export interface Envelope {
  v: number;
  type: string;
  payload: Record<string, unknown>;
}

export interface HelloPayload {
  formats: string[];
  format: string;
  tick_ms: number;
  frame_size: [number, number];
  render_resolution: [number, number];
  markers: string[];
}

export interface DocElement {
  id: string;
  kind: string;
  bounds: [number, number, number, number];
  locked: boolean;
  z: number;
  state: Record<string, unknown>;
}

export interface DocPayload {
  revision: number;
  doc: {
    version: number;
    mode: string;
    inspector_open: boolean;
    palette: DocElement[];
    elements: DocElement[];
    connections: { from: [string, string]; to: [string, string] }[];
  };
  palette_layout: [number, number, number, number][];
}

export interface PanelPayload {
  revision: number;
  format: string;
  width: number;
  height: number;
  data: string; // base64 PPM or PNG
}

export interface MarkerRecord {
  id: string;
  position: [number, number] | null;
  velocity: [number, number];
  last_seen: number;
}

export interface GestureRecord {
  kind: string;
  target: string;
  position?: [number, number];
  scale?: number;
}

export interface TickPayload {
  tick: number;
  timestamp_ms: number;
  markers: MarkerRecord[];
  clicks: { time_ms: number; peak_level: number }[];
  gestures: GestureRecord[];
  doc_revision: number;
  render_digest: string;
}

export interface ErrorPayload {
  message: string;
  pointer?: string;
}

export const CLOSE_VERSION_MISMATCH = 4001;
export const CLOSE_SESSION_BUSY = 4002;

export function envelope(type: string, payload: Record<string, unknown> = {}): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, type, payload });
}

/** Parse an inbound frame; returns null for anything that is not a valid envelope. */
export function parseEnvelope(raw: unknown): Envelope | null {
  if (typeof raw !== "string") return null;
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) return null;
  const msg = data as Record<string, unknown>;
  if (typeof msg.type !== "string" || typeof msg.v !== "number") return null;
  const payload = (typeof msg.payload === "object" && msg.payload !== null)
    ? msg.payload as Record<string, unknown>
    : {};
  return { v: msg.v, type: msg.type, payload };
}

/** Positions keyed by marker id; null/missing means the marker is absent. */
export type MarkerPositions = Record<string, [number, number] | null>;

export function syntheticFrame(markers: MarkerPositions): string {
  return envelope("synthetic_frame", { markers });
}
