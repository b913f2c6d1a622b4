import { afterEach, beforeEach, describe, expect, it } from "vitest";
import WebSocket, { WebSocketServer } from "ws";
import { StreamClient } from "../src/client";
import { frameMessage } from "../src/frames";
import type { ServerMessage } from "../src/protocol";

let wss: WebSocketServer;
let url: string;

beforeEach(async () => {
  wss = new WebSocketServer({ port: 0 });
  await new Promise((resolve) => wss.once("listening", resolve));
  url = `ws://127.0.0.1:${(wss.address() as any).port}`;
});

afterEach(() => {
  wss.close();
});

const silent = { onMessage: () => {}, onStatus: () => {} };

function frame(tMs: number) {
  return frameMessage(tMs, null, null, null);
}

describe("StreamClient", () => {
  it("sends hello first and holds frames until the server is ready", async () => {
    const received: any[] = [];
    const done = new Promise<void>((resolve) => {
      wss.on("connection", (sock) => {
        sock.on("message", (data) => {
          const msg = JSON.parse(String(data));
          received.push(msg);
          if (msg.type === "hello") {
            sock.send(JSON.stringify({ type: "ready", target_fps: 5, window: 2, class_count: 3 }));
          }
          if (received.length === 4) resolve();
        });
      });
    });

    const client = new StreamClient(url, 24, silent, { socketImpl: WebSocket as any });
    // pushed before the socket even opened: must be queued, not lost
    client.sendFrame(frame(1));
    client.sendFrame(frame(2));
    client.sendFrame(frame(3));
    await done;
    client.close();

    expect(received.map((m: any) => m.type)).toEqual(["hello", "frame", "frame", "frame"]);
    expect(received[0].fps).toBe(24);
    expect(received.slice(1).map((m: any) => m.t_ms)).toEqual([1, 2, 3]);
  });

  it("drops the oldest frames under backpressure", () => {
    // never ready: nothing drains, the queue caps out
    const client = new StreamClient(url, 30, silent, {
      socketImpl: WebSocket as any,
      queueCapacity: 4,
    });
    for (let t = 0; t < 10; t++) client.sendFrame(frame(t));
    expect(client.pending).toBe(4);
    expect(client.dropped).toBe(6);
    client.close();
  });

  it("survives malformed server messages and keeps delivering good ones", async () => {
    wss.on("connection", (sock) => {
      sock.on("message", () => {
        sock.send("garbage that is not json");
        sock.send('{"type": "mystery"}');
        sock.send(JSON.stringify({ type: "ready", target_fps: 5, window: 2, class_count: 3 }));
        sock.send(JSON.stringify({ type: "error", message: "still here" }));
      });
    });

    const seen: ServerMessage[] = [];
    const done = new Promise<void>((resolve) => {
      const client = new StreamClient(
        url,
        30,
        {
          onMessage: (msg) => {
            seen.push(msg);
            if (seen.length === 2) {
              client.close();
              resolve();
            }
          },
          onStatus: () => {},
        },
        { socketImpl: WebSocket as any },
      );
    });
    await done;
    expect(seen.map((m) => m.type)).toEqual(["ready", "error"]);
  });

  it("reports status transitions through to close", async () => {
    wss.on("connection", (sock) => {
      sock.on("message", () => {
        sock.send(JSON.stringify({ type: "ready", target_fps: 5, window: 2, class_count: 1 }));
      });
    });
    const statuses: string[] = [];
    const closed = new Promise<void>((resolve) => {
      const client = new StreamClient(
        url,
        30,
        {
          onMessage: (msg) => {
            if (msg.type === "ready") client.close();
          },
          onStatus: (status) => {
            statuses.push(status);
            if (status === "closed") resolve();
          },
        },
        { socketImpl: WebSocket as any },
      );
    });
    await closed;
    expect(statuses).toEqual(["connecting", "ready", "closed"]);
  });
});
