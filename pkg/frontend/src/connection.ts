/**
 * Session connection with request/reply pairing and backoff reconnect.
 *
 * The service guarantees one reply per event, in order, so replies are
 * matched to pending sends FIFO. A reconnect starts a brand-new session
 * (new id, clean scene) and re-delivers the instruction panel.
 */

import {
  Instructions,
  ServerMsg,
  SessionEventMsg,
  isInstructions,
  parseServerMsg,
} from "./protocol.js";

/** Minimal socket surface so tests can inject fakes. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionStatus = "connecting" | "online" | "offline";

export interface ConnectionHooks {
  onStatus?: (s: ConnectionStatus) => void;
  onInstructions?: (i: Instructions) => void;
}

export interface BackoffOptions {
  initialMs: number;
  maxMs: number;
  factor: number;
}

export const DEFAULT_BACKOFF: BackoffOptions = { initialMs: 250, maxMs: 8000, factor: 2 };

interface Pending {
  resolve: (m: ServerMsg) => void;
  reject: (e: Error) => void;
}

export class SessionConnection {
  private socket: SocketLike | null = null;
  private pending: Pending[] = [];
  private backoffMs: number;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closed = false;
  status: ConnectionStatus = "offline";
  instructions: Instructions | null = null;

  constructor(
    private url: string,
    private factory: SocketFactory,
    private hooks: ConnectionHooks = {},
    private backoff: BackoffOptions = DEFAULT_BACKOFF,
  ) {
    this.backoffMs = backoff.initialMs;
  }

  connect(): void {
    if (this.closed) throw new Error("connection closed");
    this.setStatus("connecting");
    const sock = this.factory(this.url);
    this.socket = sock;
    sock.onopen = () => {
      this.backoffMs = this.backoff.initialMs;
      this.setStatus("online");
    };
    sock.onmessage = (ev) => this.handleMessage(ev.data);
    sock.onerror = () => {
      // onclose follows; nothing to do here
    };
    sock.onclose = () => this.handleClose();
  }

  /** Send one event; resolves with the matching snapshot or error reply. */
  send(msg: SessionEventMsg): Promise<ServerMsg> {
    if (this.status !== "online" || this.socket === null) {
      return Promise.reject(new Error("offline"));
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.socket!.send(JSON.stringify(msg));
    });
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.socket?.close();
    this.failPending("connection closed");
    this.setStatus("offline");
  }

  private handleMessage(raw: string): void {
    let msg: ServerMsg;
    try {
      msg = parseServerMsg(raw);
    } catch {
      return; // ignore garbage rather than wedging the reply queue
    }
    if (isInstructions(msg)) {
      this.instructions = msg;
      this.hooks.onInstructions?.(msg);
      return;
    }
    const p = this.pending.shift();
    p?.resolve(msg);
  }

  private handleClose(): void {
    this.socket = null;
    this.failPending("socket closed");
    if (this.closed) return;
    this.setStatus("offline");
    this.reconnectTimer = setTimeout(() => this.connect(), this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * this.backoff.factor, this.backoff.maxMs);
  }

  private failPending(reason: string): void {
    const waiting = this.pending;
    this.pending = [];
    for (const p of waiting) p.reject(new Error(reason));
  }

  private setStatus(s: ConnectionStatus): void {
    this.status = s;
    this.hooks.onStatus?.(s);
  }
}
