import { describe, expect, it } from "vitest";
import { frameMessage, splitHands, toBlock } from "../src/frames";
import {
  HAND_POINTS,
  POSE_POINTS,
  isFrameMessage,
  parseServerMessage,
} from "../src/protocol";
import type { Point } from "../src/protocol";

const point = (i: number): Point => [i * 0.01, i * 0.02, i * 0.03];
const hand = Array.from({ length: HAND_POINTS }, (_, i) => point(i));
const pose = Array.from({ length: POSE_POINTS }, (_, i) => point(i + 50));

describe("frame schema", () => {
  it("accepts a full frame and all-null blocks", () => {
    expect(isFrameMessage(frameMessage(12, hand, hand, pose))).toBe(true);
    // covered camera: detections absent but the message still flows
    expect(isFrameMessage(frameMessage(12, null, null, null))).toBe(true);
  });

  it("rejects wrong point counts, bad values and missing fields", () => {
    expect(isFrameMessage(frameMessage(0, hand.slice(0, 20), null, null))).toBe(false);
    expect(isFrameMessage(frameMessage(0, null, null, hand))).toBe(false);
    const nanHand = hand.map((p) => [...p] as Point);
    nanHand[3][1] = Number.NaN;
    expect(isFrameMessage(frameMessage(0, nanHand, null, null))).toBe(false);
    expect(isFrameMessage({ type: "frame", left: null, right: null, pose: null })).toBe(false);
    expect(isFrameMessage({ type: "hello", fps: 30 })).toBe(false);
  });
});

describe("landmark conversion", () => {
  const lm = (n: number) =>
    Array.from({ length: n }, (_, i) => ({ x: i, y: i + 0.5, z: -i }));

  it("truncates the 33-point pose to the 25-point upper-body prefix", () => {
    const block = toBlock(lm(33), POSE_POINTS);
    expect(block).toHaveLength(25);
    expect(block![24]).toEqual([24, 24.5, -24]);
  });

  it("passes coordinates through verbatim", () => {
    const block = toBlock(lm(21), HAND_POINTS)!;
    expect(block[7]).toEqual([7, 7.5, -7]);
  });

  it("maps missing or short detections to null", () => {
    expect(toBlock(undefined, HAND_POINTS)).toBeNull();
    expect(toBlock(lm(10), HAND_POINTS)).toBeNull();
  });

  it("splits hands by reported handedness", () => {
    const result = {
      landmarks: [lm(21), lm(21)],
      handedness: [[{ categoryName: "Right" }], [{ categoryName: "Left" }]],
    };
    const { left, right } = splitHands(result);
    expect(left).not.toBeNull();
    expect(right).not.toBeNull();
    expect(splitHands({ landmarks: [], handedness: [] })).toEqual({
      left: null,
      right: null,
    });
  });
});

describe("server message parsing", () => {
  it("accepts the four well-formed message kinds", () => {
    const ready = '{"type": "ready", "target_fps": 5.0, "window": 2, "class_count": 4}';
    const pred =
      '{"type": "prediction", "t_ms": 3, "top": [{"sign_id": 1, "gloss": "A", "p": 0.9}], "emitted": ["A"]}';
    const flushed = '{"type": "flushed", "sign_ids": [1], "tokens": ["A"]}';
    const error = '{"type": "error", "message": "nope"}';
    expect(parseServerMessage(ready)?.type).toBe("ready");
    expect(parseServerMessage(pred)?.type).toBe("prediction");
    expect(parseServerMessage(flushed)?.type).toBe("flushed");
    expect(parseServerMessage(error)?.type).toBe("error");
  });

  it("returns null for malformed input", () => {
    for (const text of [
      "not json at all",
      "42",
      "null",
      '"a string"',
      '{"type": "mystery"}',
      '{"no_type": true}',
      '{"type": "prediction", "top": "high", "emitted": []}',
      '{"type": "prediction", "top": [], "emitted": [7]}',
      '{"type": "flushed", "tokens": "ABC"}',
      '{"type": "ready", "target_fps": "fast"}',
      '{"type": "error"}',
    ]) {
      expect(parseServerMessage(text)).toBeNull();
    }
  });
});
