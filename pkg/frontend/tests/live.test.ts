// Opt-in check against a real running service, skipped otherwise:
//
//   signstream serve --model model.slrm --port 8765 &
//   SIGNSTREAM_WS_URL=ws://127.0.0.1:8765/stream npm test

import { describe, expect, it } from "vitest";
import WebSocket from "ws";
import { StreamClient } from "../src/client";
import { frameMessage } from "../src/frames";
import type { ServerMessage } from "../src/protocol";

const url = process.env.SIGNSTREAM_WS_URL;

describe.skipIf(!url)("live service", () => {
  it("handshakes, streams a clip of null blocks and flushes", async () => {
    const seen: ServerMessage[] = [];
    const statuses: string[] = [];
    const flushed = new Promise<void>((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("no flushed reply")), 10_000);
      const client = new StreamClient(
        url!,
        24,
        {
          onMessage: (msg) => {
            seen.push(msg);
            if (msg.type === "flushed") {
              clearTimeout(timer);
              client.close();
              resolve();
            }
          },
          onStatus: (status) => statuses.push(status),
        },
        { socketImpl: WebSocket as any },
      );
      // a covered camera: detections absent, messages still flow
      for (let t = 0; t < 30; t++) {
        client.sendFrame(frameMessage(t * 41, null, null, null));
      }
      client.flush();
      // frames queue until ready, so flush again once the handshake lands
      const poke = setInterval(() => {
        if (statuses.includes("ready")) {
          client.flush();
          clearInterval(poke);
        }
      }, 50);
    });
    await flushed;

    expect(statuses).toContain("ready");
    const ready = seen.find((m) => m.type === "ready");
    expect(ready && "class_count" in ready && ready.class_count).toBeGreaterThan(0);
    const last = seen[seen.length - 1];
    expect(last.type).toBe("flushed");
    expect("tokens" in last && Array.isArray(last.tokens)).toBe(true);
    const predictions = seen.filter((m) => m.type === "prediction");
    expect(predictions.length).toBeGreaterThan(0);
    console.log(
      `live service: ${predictions.length} predictions, ` +
        `flushed tokens: ${"tokens" in last ? JSON.stringify(last.tokens) : "?"}`,
    );
  });
});
