// Wire schema for the /stream WebSocket. One JSON document per text frame,
// field names exactly as the server speaks them.

export type Point = [number, number, number];
export type Block = Point[] | null;

export const HAND_POINTS = 21;
export const POSE_POINTS = 25;

export type HelloMessage = { type: "hello"; fps: number };

export type FrameMessage = {
  type: "frame";
  t_ms: number;
  left: Block;
  right: Block;
  pose: Block;
};

export type FlushMessage = { type: "flush" };

export type TopEntry = { sign_id: number; gloss: string; p: number };

export type ReadyMessage = {
  type: "ready";
  target_fps: number;
  window: number;
  class_count: number;
};

export type PredictionMessage = {
  type: "prediction";
  t_ms: number | null;
  top: TopEntry[];
  emitted: string[];
};

export type FlushedMessage = {
  type: "flushed";
  sign_ids: number[];
  tokens: string[];
};

export type ErrorMessage = { type: "error"; message: string };

export type ServerMessage =
  | ReadyMessage
  | PredictionMessage
  | FlushedMessage
  | ErrorMessage;

function isPoint(p: any): p is Point {
  return (
    Array.isArray(p) &&
    p.length === 3 &&
    p.every((v) => typeof v === "number" && Number.isFinite(v))
  );
}

function isBlock(b: any, points: number): b is Block {
  if (b === null) return true;
  return Array.isArray(b) && b.length === points && b.every(isPoint);
}

/** Schema check for outgoing frames; the server rejects anything else. */
export function isFrameMessage(msg: any): msg is FrameMessage {
  return (
    !!msg &&
    typeof msg === "object" &&
    msg.type === "frame" &&
    typeof msg.t_ms === "number" &&
    Number.isFinite(msg.t_ms) &&
    isBlock(msg.left, HAND_POINTS) &&
    isBlock(msg.right, HAND_POINTS) &&
    isBlock(msg.pose, POSE_POINTS)
  );
}

/**
 * Parse one incoming text frame. Returns null for anything malformed so the
 * caller can log it and leave the UI untouched.
 */
export function parseServerMessage(text: string): ServerMessage | null {
  let msg: any;
  try {
    msg = JSON.parse(text);
  } catch {
    return null;
  }
  if (!msg || typeof msg !== "object") return null;
  switch (msg.type) {
    case "ready":
      if (typeof msg.target_fps !== "number" || typeof msg.class_count !== "number") {
        return null;
      }
      return msg as ReadyMessage;
    case "prediction": {
      if (!Array.isArray(msg.top) || !Array.isArray(msg.emitted)) return null;
      const topOk = msg.top.every(
        (e: any) =>
          !!e &&
          typeof e.sign_id === "number" &&
          typeof e.gloss === "string" &&
          typeof e.p === "number",
      );
      const emittedOk = msg.emitted.every((t: any) => typeof t === "string");
      return topOk && emittedOk ? (msg as PredictionMessage) : null;
    }
    case "flushed":
      if (!Array.isArray(msg.tokens) || !msg.tokens.every((t: any) => typeof t === "string")) {
        return null;
      }
      return msg as FlushedMessage;
    case "error":
      return typeof msg.message === "string" ? (msg as ErrorMessage) : null;
    default:
      return null;
  }
}
