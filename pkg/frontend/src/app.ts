// Browser workbench. The canvas shows the live panel composite; the pointer
// is the virtual fingertip (frames stream at the server tick rate), a click
// or the Tap button plays the tap sound, Shift holds a second fingertip for
// pinch resizing, and palette entries drag onto the canvas as document
// edits. The right column is the gesture event feed.

import { calibrate } from "./calibrate.js";
import { SocketLike, WorkbenchClient } from "./client.js";
import { QuadMap, uvToFrame } from "./mapping.js";
import { base64ToBytes, decodePpm } from "./ppm.js";
import { DocElement, MarkerPositions } from "./protocol.js";
import * as store from "./store.js";

const OUTLETS: Record<string, string[]> = { button: ["pressed"], slider: ["value"] };
const INLETS: Record<string, string[]> = { screen: ["advance", "jump"], label: ["text"] };
const QUEUE_MS = 1000;

type Pointer = { frame: [number, number]; uv: [number, number] } | null;

class WorkbenchApp {
  private view = store.initialView();
  private client: WorkbenchClient;
  private quad: QuadMap | null = null;
  private pointer: Pointer = null;
  private pinchAnchor: [number, number] | null = null; // frame coords, set on Shift
  private queued: { at: number }[] = [];
  private panelBitmap: HTMLCanvasElement | null = null;

  private canvas = el<HTMLCanvasElement>("panel-canvas");
  private feedList = el<HTMLUListElement>("event-feed");
  private paletteList = el<HTMLUListElement>("palette");
  private inspector = el<HTMLDivElement>("inspector");
  private banner = el<HTMLDivElement>("banner");
  private status = el<HTMLSpanElement>("status");
  private revisionLabel = el<HTMLSpanElement>("revision");
  private modeButton = el<HTMLButtonElement>("mode-toggle");
  private tapButton = el<HTMLButtonElement>("tap-button");

  constructor(url: string) {
    this.client = new WorkbenchClient(url, (u) => new WebSocket(u) as unknown as SocketLike, {
      onDoc: (doc) => { this.view = store.applyDoc(this.view, doc); this.render(); },
      onPanel: (panel) => {
        this.view = store.applyPanel(this.view, panel);
        this.decodePanel();
        this.render();
      },
      onTick: (tick) => { this.view = store.applyTick(this.view, tick); this.renderFeed(); },
      onError: (err) => { this.view = store.applyError(this.view, err.message); this.render(); },
      onClose: () => {
        // the frame loop keeps running so pointer input queues briefly,
        // then drops with a banner
        this.view = { ...this.view, connection: "closed", banner: "connection closed" };
        this.render();
      },
    });
  }

  async start(): Promise<void> {
    await this.client.connect();
    this.view = { ...this.view, connection: "connected" };
    if (this.client.lastDoc) this.view = store.applyDoc(this.view, this.client.lastDoc);
    if (this.client.lastPanel) this.view = store.applyPanel(this.view, this.client.lastPanel);
    this.decodePanel();
    this.render();

    this.quad = await calibrate(this.client, this.primaryMarker());
    this.wireInputs();
    const tickMs = this.client.hello?.tick_ms ?? 40;
    window.setInterval(() => this.pumpFrame(), tickMs);
  }

  private primaryMarker(): string {
    const ids = this.client.hello?.markers ?? [];
    return ids.includes("index") ? "index" : ids[0] ?? "index";
  }

  private secondaryMarker(): string | null {
    const ids = this.client.hello?.markers ?? [];
    const rest = ids.filter((id) => id !== this.primaryMarker());
    return rest[0] ?? null;
  }

  // ------------------------------------------------------------ frame loop

  private pumpFrame(): void {
    if (this.view.connection !== "connected") {
      if (!this.pointer) return; // nothing to queue
      this.queued.push({ at: Date.now() });
      const cutoff = Date.now() - QUEUE_MS;
      if (this.queued.some((q) => q.at < cutoff)) {
        this.queued = [];
        this.view = store.applyError(this.view, "offline: pointer input dropped");
        this.render();
      }
      return;
    }
    const markers: MarkerPositions = {};
    const primary = this.primaryMarker();
    markers[primary] = this.pointer ? this.pointer.frame : null;
    const secondary = this.secondaryMarker();
    if (secondary) {
      markers[secondary] = null;
      if (this.pointer && this.pinchAnchor) {
        // mirror the pointer about the anchor for the two-finger pinch
        markers[secondary] = [
          2 * this.pinchAnchor[0] - this.pointer.frame[0],
          2 * this.pinchAnchor[1] - this.pointer.frame[1],
        ];
      }
    }
    void this.client.tick(markers).catch(() => undefined);
  }

  // ---------------------------------------------------------------- inputs

  private wireInputs(): void {
    this.canvas.addEventListener("pointermove", (ev) => {
      const uv = this.canvasUv(ev);
      if (!uv || !this.quad) return;
      const p = uvToFrame(this.quad, uv[0], uv[1]);
      this.pointer = { frame: [p.x, p.y], uv };
    });
    this.canvas.addEventListener("pointerleave", () => { this.pointer = null; });
    this.canvas.addEventListener("click", () => this.client.tap());
    this.tapButton.addEventListener("click", () => this.client.tap());

    window.addEventListener("keydown", (ev) => {
      if (ev.key === "Shift" && this.pointer && this.pinchAnchor === null) {
        this.pinchAnchor = [...this.pointer.frame];
      }
    });
    window.addEventListener("keyup", (ev) => {
      if (ev.key === "Shift") this.pinchAnchor = null;
    });

    this.modeButton.addEventListener("click", () => {
      const mode = this.view.doc?.doc.mode === "edit" ? "run" : "edit";
      void this.client.modeChange(mode).catch(() => undefined);
    });

    this.canvas.addEventListener("dragover", (ev) => ev.preventDefault());
    this.canvas.addEventListener("drop", (ev) => {
      ev.preventDefault();
      const template = ev.dataTransfer?.getData("text/template");
      const uv = this.canvasUv(ev);
      if (!template || !uv) return;
      this.view = store.beginPlacement(this.view, template, uv);
      this.render();
      this.client.send("doc_edit", { action: "place", template, position: uv });
    });
  }

  private canvasUv(ev: MouseEvent): [number, number] | null {
    const rect = this.canvas.getBoundingClientRect();
    const u = (ev.clientX - rect.left) / rect.width;
    const v = (ev.clientY - rect.top) / rect.height;
    if (u < 0 || u > 1 || v < 0 || v > 1) return null;
    return [u, v];
  }

  // ------------------------------------------------------------- rendering

  private decodePanel(): void {
    const panel = this.view.panel;
    if (!panel || panel.format !== "ppm") return;
    const img = decodePpm(base64ToBytes(panel.data));
    const off = document.createElement("canvas");
    off.width = img.width;
    off.height = img.height;
    // copy pins the backing store to a plain ArrayBuffer for ImageData
    const rgba = new Uint8ClampedArray(img.rgba);
    off.getContext("2d")!.putImageData(new ImageData(rgba, img.width, img.height), 0, 0);
    this.panelBitmap = off;
  }

  private render(): void {
    this.status.textContent = this.view.connection;
    this.status.className = this.view.connection;
    this.revisionLabel.textContent = `rev ${this.view.panel?.revision ?? "-"}`;
    this.banner.textContent = this.view.banner ?? "";
    this.banner.style.display = this.view.banner ? "block" : "none";

    const doc = this.view.doc?.doc;
    this.modeButton.textContent = doc ? `mode: ${doc.mode}` : "mode: ?";
    this.renderPalette();
    this.renderInspector();
    this.renderCanvas();
    this.renderFeed();
  }

  private renderCanvas(): void {
    const ctx = this.canvas.getContext("2d")!;
    ctx.imageSmoothingEnabled = false;
    ctx.fillStyle = "#101014";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.panelBitmap) {
      ctx.drawImage(this.panelBitmap, 0, 0, this.canvas.width, this.canvas.height);
    }
    if (this.view.pending) {
      const [u, v] = this.view.pending.position;
      ctx.strokeStyle = "#9ad";
      ctx.setLineDash([4, 3]);
      ctx.strokeRect(u * this.canvas.width - 20, v * this.canvas.height - 12, 40, 24);
      ctx.setLineDash([]);
    }
    if (this.pointer) {
      const [u, v] = this.pointer.uv;
      ctx.strokeStyle = "#f55";
      ctx.beginPath();
      ctx.arc(u * this.canvas.width, v * this.canvas.height, 6, 0, Math.PI * 2);
      ctx.stroke();
    }
  }

  private renderPalette(): void {
    const doc = this.view.doc?.doc;
    this.paletteList.textContent = "";
    if (!doc) return;
    const editable = doc.mode === "edit";
    for (const template of doc.palette) {
      if (template.kind === "lock") continue; // the lock control is not placeable
      const item = document.createElement("li");
      item.textContent = template.id;
      item.draggable = editable;
      item.className = editable ? "template" : "template disabled";
      item.addEventListener("dragstart", (ev) => {
        ev.dataTransfer?.setData("text/template", template.id);
      });
      this.paletteList.appendChild(item);
    }
  }

  private renderInspector(): void {
    const docPayload = this.view.doc;
    this.inspector.textContent = "";
    if (!docPayload || !docPayload.doc.inspector_open) {
      this.inspector.style.display = "none";
      return;
    }
    this.inspector.style.display = "block";
    const doc = docPayload.doc;
    for (const element of doc.elements) {
      const row = document.createElement("div");
      row.className = "element-row";
      const label = document.createElement("span");
      label.textContent = `${element.id} (${element.kind})${element.locked ? " [locked]" : ""}`;
      const lockBtn = document.createElement("button");
      lockBtn.textContent = element.locked ? "unlock" : "lock";
      lockBtn.addEventListener("click", () => {
        this.client.send("doc_edit",
          { action: "lock", element: element.id, locked: !element.locked });
      });
      row.append(label, lockBtn);
      this.inspector.appendChild(row);
    }
    this.inspector.appendChild(this.connectForm(doc.elements));
    const list = document.createElement("div");
    list.className = "connections";
    list.textContent = doc.connections
      .map((c) => `${c.from[0]}.${c.from[1]} -> ${c.to[0]}.${c.to[1]}`)
      .join("\n") || "no connections";
    this.inspector.appendChild(list);
  }

  private connectForm(elements: DocElement[]): HTMLElement {
    const form = document.createElement("div");
    form.className = "connect-form";
    const fromSel = document.createElement("select");
    const toSel = document.createElement("select");
    for (const element of elements) {
      for (const port of OUTLETS[element.kind] ?? []) {
        fromSel.add(new Option(`${element.id}.${port}`, `${element.id}:${port}`));
      }
      for (const port of INLETS[element.kind] ?? []) {
        toSel.add(new Option(`${element.id}.${port}`, `${element.id}:${port}`));
      }
    }
    const btn = document.createElement("button");
    btn.textContent = "connect";
    btn.addEventListener("click", () => {
      if (!fromSel.value || !toSel.value) return;
      this.client.send("doc_edit", {
        action: "connect",
        from: fromSel.value.split(":"),
        to: toSel.value.split(":"),
      });
    });
    form.append(fromSel, document.createTextNode(" to "), toSel, btn);
    return form;
  }

  private renderFeed(): void {
    this.feedList.textContent = "";
    for (const entry of [...this.view.feed].reverse()) {
      const item = document.createElement("li");
      const pos = entry.gesture.position
        ? ` @ (${entry.gesture.position[0].toFixed(2)}, ${entry.gesture.position[1].toFixed(2)})`
        : "";
      const scale = entry.gesture.scale !== undefined
        ? ` x${entry.gesture.scale.toFixed(2)}` : "";
      item.textContent = `#${entry.tick} ${entry.gesture.kind} ${entry.gesture.target}${pos}${scale}`;
      this.feedList.appendChild(item);
    }
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const params = new URLSearchParams(location.search);
const url = params.get("ws") ?? "ws://127.0.0.1:8765";
const app = new WorkbenchApp(url);
app.start().catch((err) => {
  const banner = document.getElementById("banner");
  if (banner) {
    banner.textContent = String(err);
    (banner as HTMLElement).style.display = "block";
  }
});
