import { startCapture, type CaptureHandle } from "./capture";
import { StreamClient } from "./client";
import { parseRecordCsv, playReplay } from "./replay";
import {
  applyServerMessage,
  initialState,
  resetTranscript,
  setCaptureFps,
  setStatus,
  type UiState,
} from "./state";

let state: UiState = initialState();
let client: StreamClient | null = null;
let capture: CaptureHandle | null = null;

const el = (id: string) => document.getElementById(id)!;

function update(next: UiState) {
  state = next;
  render();
}

function render() {
  const status = el("status");
  status.textContent = state.statusDetail
    ? `${state.status}: ${state.statusDetail}`
    : state.status;
  status.className = `status ${state.status}`;

  el("meta").textContent =
    `${state.classCount} classes | capture ${state.captureFps.toFixed(1)} fps | ` +
    `round trip ${state.latencyMs.toFixed(0)} ms`;

  const topk = el("topk");
  topk.innerHTML = "";
  for (const entry of state.top) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.textContent = entry.gloss;
    const bar = document.createElement("div");
    bar.className = "bar";
    bar.style.width = `${Math.round(entry.p * 100)}%`;
    const pct = document.createElement("span");
    pct.className = "pct";
    pct.textContent = `${(entry.p * 100).toFixed(1)}%`;
    row.append(label, bar, pct);
    topk.appendChild(row);
  }

  el("transcript").textContent = state.transcript.join(" ") || "(nothing yet)";
  el("final").textContent = state.finalTokens.length
    ? state.finalTokens.join(" ")
    : "";
}

function wsUrl(): string {
  const raw = (el("ws-url") as HTMLInputElement).value.trim();
  if (raw) return raw;
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/stream`;
}

function connect(fps: number): StreamClient {
  client?.close();
  const fresh = new StreamClient(wsUrl(), fps, {
    onMessage: (msg) => update(applyServerMessage(state, msg, performance.now())),
    onStatus: (status, detail) => update(setStatus(state, status, detail ?? "")),
  });
  client = fresh;
  return fresh;
}

async function onStartCamera() {
  if (capture) {
    capture.stop();
    capture = null;
    el("camera-btn").textContent = "Start camera";
    return;
  }
  const session = connect(30);
  const handle = await startCapture({
    onFrame: (frame) => session.sendFrame(frame),
    onFps: (fps) => update(setCaptureFps(state, fps)),
    onError: (message) => update(setStatus(state, "error", message)),
  });
  if (!handle) return;
  capture = handle;
  el("camera-btn").textContent = "Stop camera";
  const slot = el("preview");
  slot.innerHTML = "";
  handle.video.className = "preview";
  slot.appendChild(handle.video);
}

async function onReplayFile(file: File) {
  const videos = parseRecordCsv(await file.text());
  if (videos.length === 0) {
    update(setStatus(state, "error", "no frames in file"));
    return;
  }
  for (const video of videos) {
    const session = connect(video.fps);
    update(resetTranscript(state));
    await playReplay(video, (frame) => session.sendFrame(frame));
    session.flush();
    // give the flushed message a moment before the next clip reconnects
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
}

el("camera-btn").addEventListener("click", () => {
  onStartCamera().catch((err) => update(setStatus(state, "error", String(err))));
});
el("flush-btn").addEventListener("click", () => client?.flush());
el("reset-btn").addEventListener("click", () => update(resetTranscript(state)));
el("replay-input").addEventListener("change", (ev) => {
  const file = (ev.target as HTMLInputElement).files?.[0];
  if (file) {
    onReplayFile(file).catch((err) => update(setStatus(state, "error", String(err))));
  }
});

render();
