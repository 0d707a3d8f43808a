import { describe, expect, it } from "vitest";
import { PanelPayload, TickPayload } from "../src/protocol.js";
import * as store from "../src/store.js";

function panel(revision: number): PanelPayload {
  return { revision, format: "ppm", width: 4, height: 4, data: "" };
}

function tick(n: number, kinds: string[]): TickPayload {
  return {
    tick: n,
    timestamp_ms: n * 40,
    markers: [],
    clicks: [],
    gestures: kinds.map((kind) => ({ kind, target: "surface" })),
    doc_revision: 1,
    render_digest: "",
  };
}

describe("panel revisions", () => {
  it("never run backwards", () => {
    let view = store.applyPanel(store.initialView(), panel(5));
    view = store.applyPanel(view, panel(3));
    expect(view.panel!.revision).toBe(5);
    view = store.applyPanel(view, panel(6));
    expect(view.panel!.revision).toBe(6);
  });
});

describe("event feed", () => {
  it("keeps gestures in arrival order", () => {
    let view = store.applyTick(store.initialView(), tick(1, ["scan"]));
    view = store.applyTick(view, tick(2, ["click", "scan"]));
    expect(view.feed.map((e) => `${e.tick}:${e.gesture.kind}`))
      .toEqual(["1:scan", "2:click", "2:scan"]);
  });

  it("drops the oldest entries past the cap", () => {
    let view = store.initialView();
    for (let i = 0; i < store.FEED_LIMIT + 30; i++) {
      view = store.applyTick(view, tick(i, ["scan"]));
    }
    expect(view.feed.length).toBe(store.FEED_LIMIT);
    expect(view.feed[0].tick).toBe(30);
    expect(view.feed[view.feed.length - 1].tick).toBe(store.FEED_LIMIT + 29);
  });

  it("ignores gesture-free ticks", () => {
    const before = store.applyTick(store.initialView(), tick(1, ["scan"]));
    expect(store.applyTick(before, tick(2, []))).toBe(before);
  });
});

describe("optimistic placement", () => {
  const docPayload = {
    revision: 2,
    doc: {
      version: 1, mode: "edit", inspector_open: false,
      palette: [], elements: [], connections: [],
    },
    palette_layout: [],
  };

  it("settles on the next authoritative doc", () => {
    let view = store.beginPlacement(store.initialView(), "button", [0.5, 0.4]);
    expect(view.pending!.template).toBe("button");
    view = store.applyDoc(view, docPayload);
    expect(view.pending).toBeNull();
  });

  it("reverts with a banner when the edit is rejected", () => {
    let view = store.beginPlacement(store.initialView(), "button", [0.5, 0.4]);
    view = store.applyError(view, "run mode is read-only");
    expect(view.pending).toBeNull();
    expect(view.banner).toBe("edit rejected: run mode is read-only");
    view = store.clearBanner(view);
    expect(view.banner).toBeNull();
  });

  it("surfaces unrelated errors without touching state", () => {
    const view = store.applyError(store.initialView(), "unknown message");
    expect(view.banner).toBe("unknown message");
    expect(view.pending).toBeNull();
  });
});
