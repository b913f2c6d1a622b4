// Webcam capture loop: landmarks are extracted in the browser and only the
// coordinates travel over the socket, roughly 1.6 kB of JSON per frame.

import { FilesetResolver, HandLandmarker, PoseLandmarker } from "@mediapipe/tasks-vision";
import { frameMessage, posePrefix, splitHands } from "./frames";
import type { FrameMessage } from "./protocol";
import { FpsMeter } from "./state";

const WASM_BASE = "https://cdn.jsdelivr.net/npm/@mediapipe/tasks-vision@0.10.14/wasm";
const HAND_MODEL =
  "https://storage.googleapis.com/mediapipe-models/hand_landmarker/hand_landmarker/float16/1/hand_landmarker.task";
const POSE_MODEL =
  "https://storage.googleapis.com/mediapipe-models/pose_landmarker/pose_landmarker_lite/float16/1/pose_landmarker_lite.task";

export type CaptureHandle = {
  video: HTMLVideoElement;
  stop(): void;
};

export type CaptureEvents = {
  onFrame: (frame: FrameMessage) => void;
  onFps: (fps: number) => void;
  onError: (message: string) => void;
};

export async function startCapture(events: CaptureEvents): Promise<CaptureHandle | null> {
  let stream: MediaStream;
  try {
    stream = await navigator.mediaDevices.getUserMedia({
      video: { width: 640, height: 480 },
      audio: false,
    });
  } catch (err) {
    events.onError(`camera unavailable: ${err}`);
    return null;
  }

  let hands: HandLandmarker;
  let pose: PoseLandmarker;
  try {
    const vision = await FilesetResolver.forVisionTasks(WASM_BASE);
    hands = await HandLandmarker.createFromOptions(vision, {
      baseOptions: { modelAssetPath: HAND_MODEL, delegate: "GPU" },
      runningMode: "VIDEO",
      numHands: 2,
    });
    pose = await PoseLandmarker.createFromOptions(vision, {
      baseOptions: { modelAssetPath: POSE_MODEL, delegate: "GPU" },
      runningMode: "VIDEO",
    });
  } catch (err) {
    stream.getTracks().forEach((t) => t.stop());
    events.onError(`landmark models failed to load: ${err}`);
    return null;
  }

  const video = document.createElement("video");
  video.srcObject = stream;
  video.muted = true;
  video.playsInline = true;
  await video.play();

  const meter = new FpsMeter();
  let running = true;
  let lastVideoTime = -1;

  const loop = () => {
    if (!running) return;
    const now = performance.now();
    if (video.currentTime !== lastVideoTime) {
      lastVideoTime = video.currentTime;
      // a tracking miss still sends a message, just with null blocks
      const handResult = hands.detectForVideo(video, now);
      const poseResult = pose.detectForVideo(video, now);
      const { left, right } = splitHands(handResult);
      const poseBlock = posePrefix(poseResult.landmarks?.[0]);
      events.onFrame(frameMessage(Math.round(now), left, right, poseBlock));
      meter.tick(now);
      events.onFps(meter.estimate());
    }
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);

  return {
    video,
    stop() {
      running = false;
      hands.close();
      pose.close();
      stream.getTracks().forEach((t) => t.stop());
    },
  };
}
