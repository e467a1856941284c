/** Journal subscription with reconnect and a visible catch-up gap.
 *
 * The server replays the whole journal from the start of each connection
 * and then waits for any client text before sending more.  The client
 * keeps its own cursor, drops entries it has already seen, and while a
 * reconnect is replaying old entries it flags the feed as catching up so
 * the UI can show a gap indicator instead of silently losing time.  An
 * idle feed sends nothing until polled again, so the hosting view calls
 * poll() on its refresh timer.
 */

import type { JournalEntry } from "./types";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type StreamState = "connecting" | "live" | "catching_up" | "dropped";

export interface StreamOptions {
  reconnectDelayMs?: number;
  /** schedule hook, injectable for tests; defaults to setTimeout */
  schedule?: (fn: () => void, ms: number) => void;
}

export class JournalStream {
  lastSeq = 0;
  state: StreamState = "connecting";
  dropCount = 0;
  private socket: SocketLike | null = null;
  private closed = false;
  private readonly delay: number;
  private readonly schedule: (fn: () => void, ms: number) => void;

  constructor(
    private readonly url: string,
    private readonly factory: SocketFactory,
    private readonly onEntry: (entry: JournalEntry) => void,
    options: StreamOptions = {},
  ) {
    this.delay = options.reconnectDelayMs ?? 1000;
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
  }

  /** True while the feed may be behind the server. */
  get gapOpen(): boolean {
    return this.state === "catching_up" || this.state === "dropped";
  }

  connect(): void {
    // everything at or below the watermark is replayed history
    const watermark = this.lastSeq;
    const socket = this.factory(this.url);
    this.socket = socket;
    this.state = watermark > 0 ? "catching_up" : "connecting";
    socket.onopen = () => {
      if (this.state === "connecting") this.state = "live";
      socket.send("poll");
    };
    socket.onmessage = (event) => {
      const entry = JSON.parse(event.data) as JournalEntry;
      if (entry.seq > this.lastSeq) {
        this.lastSeq = entry.seq;
        this.onEntry(entry);
      }
      if (this.state === "catching_up" && entry.seq >= watermark) {
        this.state = "live";
      }
      socket.send("poll");
    };
    socket.onclose = () => {
      if (this.closed) return;
      this.dropCount += 1;
      this.state = "dropped";
      this.schedule(() => {
        if (!this.closed) this.connect();
      }, this.delay);
    };
  }

  /** Ask the server for anything new; safe to call on a timer. */
  poll(): void {
    if (this.socket && !this.closed && this.state !== "dropped") {
      this.socket.send("poll");
    }
  }

  close(): void {
    this.closed = true;
    if (this.socket) {
      try {
        this.socket.send("close");
      } catch {
        // socket already gone; close below still runs
      }
      this.socket.close();
    }
  }
}
