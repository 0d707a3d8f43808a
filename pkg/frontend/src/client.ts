// Protocol client. Works in the browser (native WebSocket) and under node
// (pass the `ws` constructor); everything above the socket is shared.

import {
  DocPayload,
  Envelope,
  ErrorPayload,
  HelloPayload,
  MarkerPositions,
  PanelPayload,
  PROTOCOL_VERSION,
  TickPayload,
  envelope,
  parseEnvelope,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(code?: number, reason?: string): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: MessageEventLike) => void) | null;
  onclose: ((ev: CloseEventLike) => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

export interface MessageEventLike { data: unknown }
export interface CloseEventLike { code: number; reason: string }

export type SocketFactory = (url: string) => SocketLike;

export interface ClientEvents {
  onDoc?: (doc: DocPayload) => void;
  onPanel?: (panel: PanelPayload) => void;
  onTick?: (tick: TickPayload) => void;
  onError?: (err: ErrorPayload) => void;
  onClose?: (code: number, reason: string) => void;
}

interface Waiter {
  resolve: (env: Envelope) => void;
  reject: (err: Error) => void;
}

const HANDSHAKE_TYPES = ["hello", "doc", "panel"];

export class WorkbenchClient {
  hello: HelloPayload | null = null;
  lastDoc: DocPayload | null = null;
  lastPanel: PanelPayload | null = null;
  closedWith: CloseEventLike | null = null;

  private socket: SocketLike | null = null;
  private waiters = new Map<string, Waiter[]>();
  private events: ClientEvents;

  constructor(private url: string, private factory: SocketFactory, events: ClientEvents = {}) {
    this.events = events;
  }

  /** Open the socket and consume the server's hello/doc/panel greeting. */
  async connect(timeoutMs = 10000): Promise<void> {
    const socket = this.factory(this.url);
    this.socket = socket;
    await new Promise<void>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("connect timeout")), timeoutMs);
      socket.onopen = () => { clearTimeout(timer); resolve(); };
      socket.onerror = (ev) => { clearTimeout(timer); reject(new Error(`socket error: ${ev}`)); };
    });
    socket.onmessage = (ev) => this.dispatch(ev.data);
    socket.onclose = (ev) => {
      this.closedWith = ev;
      this.failWaiters(new Error(`closed: ${ev.code} ${ev.reason}`));
      this.events.onClose?.(ev.code, ev.reason);
    };
    socket.onerror = null;
    for (const t of HANDSHAKE_TYPES) await this.next(t, timeoutMs);
  }

  close(): void {
    this.socket?.close(1000, "bye");
  }

  send(type: string, payload: Record<string, unknown> = {}): void {
    if (!this.socket) throw new Error("not connected");
    this.socket.send(envelope(type, payload));
  }

  /** Resolve with the next inbound message of the given type. */
  next(type: string, timeoutMs = 10000): Promise<Envelope> {
    return new Promise<Envelope>((resolve, reject) => {
      const timer = setTimeout(
        () => reject(new Error(`timed out waiting for ${type}`)), timeoutMs);
      const list = this.waiters.get(type) ?? [];
      list.push({
        resolve: (env) => { clearTimeout(timer); resolve(env); },
        reject: (err) => { clearTimeout(timer); reject(err); },
      });
      this.waiters.set(type, list);
    });
  }

  /**
   * Drive one pipeline tick: send a synthetic frame and await its record.
   * Any doc/panel broadcasts that follow a revision change are handled by
   * the regular dispatch path and land in lastDoc/lastPanel.
   */
  async tick(markers: MarkerPositions): Promise<TickPayload> {
    const reply = this.next("tick");
    this.send("synthetic_frame", { markers });
    return (await reply).payload as unknown as TickPayload;
  }

  /** Arm one audible tap; it fires inside the next synthetic frame. */
  tap(): void {
    this.send("synthetic_tap", {});
  }

  async modeChange(mode: string): Promise<void> {
    this.send("mode_change", { mode });
    await this.next("doc");
  }

  async docEdit(payload: Record<string, unknown>): Promise<DocPayload> {
    const reply = this.next("doc");
    this.send("doc_edit", payload);
    return (await reply).payload as unknown as DocPayload;
  }

  private dispatch(raw: unknown): void {
    const env = parseEnvelope(raw);
    if (env === null || env.v !== PROTOCOL_VERSION) return;
    switch (env.type) {
      case "hello":
        this.hello = env.payload as unknown as HelloPayload;
        break;
      case "doc":
        this.lastDoc = env.payload as unknown as DocPayload;
        this.events.onDoc?.(this.lastDoc);
        break;
      case "panel": {
        const panel = env.payload as unknown as PanelPayload;
        // revision must never run backwards, drop anything stale
        if (this.lastPanel === null || panel.revision >= this.lastPanel.revision) {
          this.lastPanel = panel;
          this.events.onPanel?.(panel);
        }
        break;
      }
      case "tick":
        this.events.onTick?.(env.payload as unknown as TickPayload);
        break;
      case "error":
        this.events.onError?.(env.payload as unknown as ErrorPayload);
        break;
    }
    const list = this.waiters.get(env.type);
    if (list && list.length > 0) list.shift()!.resolve(env);
  }

  private failWaiters(err: Error): void {
    for (const list of this.waiters.values()) {
      while (list.length > 0) list.shift()!.reject(err);
    }
  }
}
