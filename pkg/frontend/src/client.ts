import { parseServerMessage } from "./protocol";
import type { FrameMessage, ServerMessage } from "./protocol";
import { BoundedQueue } from "./queue";

// Minimal surface shared by the browser WebSocket and the "ws" package.
export type SocketLike = {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: any) => void) | null;
  onmessage: ((ev: { data: any }) => void) | null;
  onclose: ((ev?: any) => void) | null;
  onerror: ((ev?: any) => void) | null;
};

export type SocketCtor = new (url: string) => SocketLike;

const OPEN = 1;

export type ClientEvents = {
  onMessage: (msg: ServerMessage) => void;
  onStatus: (status: "connecting" | "ready" | "closed" | "error", detail?: string) => void;
};

export type ClientOptions = {
  socketImpl?: SocketCtor;
  queueCapacity?: number;
};

/**
 * One streaming session. Frames pushed before the ready handshake (or while
 * the socket is still connecting) sit in a bounded queue; under backpressure
 * the oldest frames are dropped so the stream stays current.
 */
export class StreamClient {
  private sock: SocketLike;
  private ready = false;
  private queue: BoundedQueue<FrameMessage>;
  dropped = 0;

  constructor(
    url: string,
    fps: number,
    private events: ClientEvents,
    opts: ClientOptions = {},
  ) {
    const Ctor = opts.socketImpl ?? (globalThis as any).WebSocket;
    if (!Ctor) throw new Error("no WebSocket implementation available");
    this.queue = new BoundedQueue(opts.queueCapacity ?? 64);
    this.events.onStatus("connecting");
    this.sock = new Ctor(url);
    this.sock.onopen = () => {
      this.sock.send(JSON.stringify({ type: "hello", fps }));
    };
    this.sock.onmessage = (ev) => {
      this.handleText(typeof ev.data === "string" ? ev.data : String(ev.data));
    };
    this.sock.onclose = () => {
      this.ready = false;
      this.events.onStatus("closed");
    };
    this.sock.onerror = () => {
      this.events.onStatus("error", "socket error");
    };
  }

  private handleText(text: string): void {
    const msg = parseServerMessage(text);
    if (msg === null) {
      // malformed server message: log it, change nothing
      console.warn("unrecognized server message:", text);
      return;
    }
    if (msg.type === "ready") {
      this.ready = true;
      this.events.onStatus("ready");
      this.pump();
    }
    this.events.onMessage(msg);
  }

  sendFrame(frame: FrameMessage): void {
    if (!this.queue.push(frame)) this.dropped += 1;
    this.pump();
  }

  private pump(): void {
    if (!this.ready || this.sock.readyState !== OPEN) return;
    for (let f = this.queue.shift(); f !== undefined; f = this.queue.shift()) {
      this.sock.send(JSON.stringify(f));
    }
  }

  flush(): void {
    if (this.ready && this.sock.readyState === OPEN) {
      this.pump();
      this.sock.send(JSON.stringify({ type: "flush" }));
    }
  }

  get pending(): number {
    return this.queue.length;
  }

  close(): void {
    this.sock.close();
  }
}
