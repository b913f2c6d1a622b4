// Landmark results to wire frames. Coordinates pass through verbatim; the
// single allowed transformation is truncating the pose list to 25 points
// (the upper-body prefix of the 33-point full-body model).

import { HAND_POINTS, POSE_POINTS } from "./protocol";
import type { Block, FrameMessage, Point } from "./protocol";

export type NormalizedLandmark = { x: number; y: number; z: number };

export function toBlock(
  landmarks: NormalizedLandmark[] | undefined,
  points: number,
): Block {
  if (!landmarks || landmarks.length < points) return null;
  return landmarks.slice(0, points).map((l) => [l.x, l.y, l.z] as Point);
}

export type HandResult = {
  landmarks?: NormalizedLandmark[][];
  handedness?: { categoryName: string }[][];
};

/** Assign detected hands to left/right slots by the reported handedness. */
export function splitHands(result: HandResult): { left: Block; right: Block } {
  let left: Block = null;
  let right: Block = null;
  const lists = result.landmarks ?? [];
  for (let i = 0; i < lists.length; i++) {
    const label = result.handedness?.[i]?.[0]?.categoryName ?? "";
    const block = toBlock(lists[i], HAND_POINTS);
    if (label === "Left") {
      left = block;
    } else if (label === "Right") {
      right = block;
    }
  }
  return { left, right };
}

export function frameMessage(
  tMs: number,
  left: Block,
  right: Block,
  pose: Block,
): FrameMessage {
  return { type: "frame", t_ms: tMs, left, right, pose };
}

export function posePrefix(landmarks: NormalizedLandmark[] | undefined): Block {
  return toBlock(landmarks, POSE_POINTS);
}
