// Automated workbench drive: the scripted loop a human would do by hand.
//
// Using only the wire protocol, it discovers the display, then authors and
// exercises a control: tap the Button template on the palette strip
// (Select), tap the panel to drop it (Place), tap the lock control (Lock),
// and tap the new element (Click). Taps ride the synthetic audio path, so
// consecutive taps are spaced five ticks apart to clear the detector's
// debounce window (see protocol.md).

import { calibrate } from "./calibrate.js";
import { WorkbenchClient } from "./client.js";
import { QuadMap, uvToFrame } from "./mapping.js";
import { DocPayload, GestureRecord, TickPayload } from "./protocol.js";

export interface DriveResult {
  gestures: GestureRecord[];        // the four expected events, in order
  placedId: string;
  panelRevisionBefore: number;
  panelRevisionAfter: number;
  elapsedMs: number;
}

function slotCenter(doc: DocPayload, kind: string): [number, number] {
  const index = doc.doc.palette.findIndex((t) => t.kind === kind);
  if (index < 0) throw new Error(`drive: no ${kind} template in palette`);
  const [x0, y0, x1, y1] = doc.palette_layout[index];
  return [(x0 + x1) / 2, (y0 + y1) / 2];
}

function requireGesture(record: TickPayload, kind: string): GestureRecord {
  const hit = record.gestures.find((g) => g.kind === kind);
  if (!hit) {
    const got = record.gestures.map((g) => `${g.kind}:${g.target}`).join(", ") || "none";
    throw new Error(`drive: expected ${kind} at tick ${record.tick}, got ${got}`);
  }
  return hit;
}

export class WorkbenchDriver {
  private quad: QuadMap | null = null;

  constructor(private client: WorkbenchClient, private markerId = "index") {}

  /**
   * Park the marker on a frame point and tap it. The hide/show pair resets
   * the position filter so the marker sits exactly on the target; two idle
   * ticks pad the gap between taps past the audio debounce.
   */
  private async tapAt(point: [number, number]): Promise<TickPayload> {
    const at = { [this.markerId]: point };
    await this.client.tick({});
    await this.client.tick(at);
    await this.client.tick(at);
    await this.client.tick(at);
    this.client.tap();
    return this.client.tick(at);
  }

  async run(placeAt: [number, number] = [0.5, 0.45]): Promise<DriveResult> {
    const t0 = performance.now();
    const client = this.client;
    if (!client.lastDoc || !client.lastPanel) throw new Error("drive: not connected");
    const panelRevisionBefore = client.lastPanel.revision;

    this.quad = await calibrate(client, this.markerId);
    const doc0 = client.lastDoc;
    const buttonTemplate = doc0.doc.palette.find((t) => t.kind === "button");
    if (!buttonTemplate) throw new Error("drive: palette has no button");
    const before = new Set(doc0.doc.elements.map((e) => e.id));

    // Select: tap the Button template on the palette strip
    const selectRec = await this.tapAt(slotCenter(doc0, "button"));
    const select = requireGesture(selectRec, "select");
    if (select.target !== buttonTemplate.id) {
      throw new Error(`drive: selected ${select.target}, wanted ${buttonTemplate.id}`);
    }

    // Place: tap the panel; the server broadcasts the grown doc afterwards
    const docAfterPlace = client.next("doc");
    const placeFrame = uvToFrame(this.quad, placeAt[0], placeAt[1]);
    const placeRec = await this.tapAt([placeFrame.x, placeFrame.y]);
    const place = requireGesture(placeRec, "place");
    const grown = (await docAfterPlace).payload as unknown as DocPayload;
    const added = grown.doc.elements.filter((e) => !before.has(e.id));
    if (added.length !== 1) throw new Error(`drive: place added ${added.length} elements`);
    const placedId = added[0].id;

    // Lock: the lock control acts on the element that was just placed
    const lockRec = await this.tapAt(slotCenter(doc0, "lock"));
    const lock = requireGesture(lockRec, "lock");
    if (lock.target !== placedId) {
      throw new Error(`drive: locked ${lock.target}, wanted ${placedId}`);
    }

    // Click: tap the now-locked element itself
    const el = client.lastDoc!.doc.elements.find((e) => e.id === placedId)!;
    const [u, v, w, h] = el.bounds;
    const clickFrame = uvToFrame(this.quad, u + w / 2, v + h / 2);
    const clickRec = await this.tapAt([clickFrame.x, clickFrame.y]);
    const click = requireGesture(clickRec, "click");
    if (click.target !== placedId) {
      throw new Error(`drive: clicked ${click.target}, wanted ${placedId}`);
    }

    return {
      gestures: [select, place, lock, click],
      placedId,
      panelRevisionBefore,
      panelRevisionAfter: client.lastPanel.revision,
      elapsedMs: performance.now() - t0,
    };
  }
}
