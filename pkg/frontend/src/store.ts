// UI session state, kept apart from the DOM so the invariants are testable:
// the panel revision never runs backwards, the event feed stays ordered and
// capped, and optimistic palette drops reconcile against the next authoritative
// doc snapshot (or revert on rejection).

import { DocPayload, GestureRecord, PanelPayload, TickPayload } from "./protocol.js";

export const FEED_LIMIT = 200;

export interface FeedEntry {
  tick: number;
  gesture: GestureRecord;
}

export interface PendingPlacement {
  template: string;
  position: [number, number];
}

export type ConnectionState = "connecting" | "connected" | "closed";

export interface SessionView {
  connection: ConnectionState;
  doc: DocPayload | null;
  panel: PanelPayload | null;
  feed: FeedEntry[];
  pending: PendingPlacement | null; // optimistic drop awaiting the next doc
  banner: string | null;
}

export function initialView(): SessionView {
  return { connection: "connecting", doc: null, panel: null, feed: [], pending: null, banner: null };
}

export function applyPanel(view: SessionView, panel: PanelPayload): SessionView {
  if (view.panel !== null && panel.revision < view.panel.revision) return view; // stale
  return { ...view, panel };
}

export function applyDoc(view: SessionView, doc: DocPayload): SessionView {
  // any authoritative snapshot settles a pending optimistic placement
  return { ...view, doc, pending: null };
}

export function applyTick(view: SessionView, tick: TickPayload): SessionView {
  if (tick.gestures.length === 0) return view;
  const feed = view.feed.concat(tick.gestures.map((gesture) => ({ tick: tick.tick, gesture })));
  return { ...view, feed: feed.length > FEED_LIMIT ? feed.slice(feed.length - FEED_LIMIT) : feed };
}

export function beginPlacement(view: SessionView, template: string,
                               position: [number, number]): SessionView {
  return { ...view, pending: { template, position } };
}

export function applyError(view: SessionView, message: string): SessionView {
  // a rejected edit reverts the optimistic drop
  if (view.pending !== null) {
    return { ...view, pending: null, banner: `edit rejected: ${message}` };
  }
  return { ...view, banner: message };
}

export function clearBanner(view: SessionView): SessionView {
  return view.banner === null ? view : { ...view, banner: null };
}
