// Replay mode: feed a recorded landmark CSV through the same socket path a
// live capture would use, one message per frame at the recorded rate.

import Papa from "papaparse";
import { frameMessage } from "./frames";
import type { Block, FrameMessage, Point } from "./protocol";

export type ReplayFrame = { left: Block; right: Block; pose: Block };

export type ReplayVideo = {
  videoId: string;
  fps: number;
  frames: ReplayFrame[];
};

function blockOf(row: Record<string, string>, suffix: string, points: number): Block {
  const pts: Point[] = [];
  for (let i = 0; i < points; i++) {
    const x = row[`x${i}_${suffix}`];
    // blocks are all-or-nothing per frame, an empty first cell means absent
    if (x === undefined || x === "") return null;
    pts.push([
      Number(x),
      Number(row[`y${i}_${suffix}`]),
      Number(row[`z${i}_${suffix}`]),
    ]);
  }
  return pts;
}

export function parseRecordCsv(text: string): ReplayVideo[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`record CSV parse failed: ${e.message} (row ${e.row})`);
  }
  const videos = new Map<string, ReplayVideo>();
  for (const row of parsed.data) {
    const id = row.video_id ?? "";
    let video = videos.get(id);
    if (!video) {
      const fps = Number(row.fps);
      if (!Number.isFinite(fps) || fps <= 0) {
        throw new Error(`bad fps ${row.fps ?? "(missing)"} in video ${id || "(missing id)"}`);
      }
      video = { videoId: id, fps, frames: [] };
      videos.set(id, video);
    }
    video.frames.push({
      left: blockOf(row, "l", 21),
      right: blockOf(row, "r", 21),
      pose: blockOf(row, "p", 25),
    });
  }
  return [...videos.values()];
}

/** Send one video's frames at its recorded rate, stamping send-time t_ms. */
export async function playReplay(
  video: ReplayVideo,
  send: (frame: FrameMessage) => void,
  now: () => number = () => performance.now(),
): Promise<void> {
  const stepMs = 1000 / video.fps;
  for (const f of video.frames) {
    send(frameMessage(Math.round(now()), f.left, f.right, f.pose));
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
}
