import type {
  PredictionMessage,
  ReadyMessage,
  FlushedMessage,
  ServerMessage,
  TopEntry,
} from "./protocol";

export type ConnectionStatus = "idle" | "connecting" | "ready" | "closed" | "error";

export type UiState = {
  status: ConnectionStatus;
  statusDetail: string;
  top: TopEntry[];
  transcript: string[];
  finalTokens: string[];
  captureFps: number;
  latencyMs: number;
  classCount: number;
};

export function initialState(): UiState {
  return {
    status: "idle",
    statusDetail: "",
    top: [],
    transcript: [],
    finalTokens: [],
    captureFps: 0,
    latencyMs: 0,
    classCount: 0,
  };
}

export function applyReady(state: UiState, msg: ReadyMessage): UiState {
  return { ...state, status: "ready", statusDetail: "", classCount: msg.class_count };
}

/**
 * Fold a prediction into the UI: top-k panel sorted by probability, emitted
 * tokens appended to the transcript, latency overlay from the echoed client
 * timestamp. The transcript only ever grows here; nothing else removes from
 * it short of an explicit reset.
 */
export function applyPrediction(state: UiState, msg: PredictionMessage, nowMs: number): UiState {
  const top = [...msg.top].sort((a, b) => b.p - a.p);
  // out-of-order timestamps would read as negative round trips, clamp at 0
  const latencyMs =
    typeof msg.t_ms === "number" ? Math.max(0, nowMs - msg.t_ms) : state.latencyMs;
  const transcript = msg.emitted.length
    ? [...state.transcript, ...msg.emitted]
    : state.transcript;
  return { ...state, top, transcript, latencyMs };
}

/** The flush result is shown on its own line: collocations arrive merged. */
export function applyFlushed(state: UiState, msg: FlushedMessage): UiState {
  return { ...state, finalTokens: [...msg.tokens] };
}

export function applyServerMessage(state: UiState, msg: ServerMessage, nowMs: number): UiState {
  switch (msg.type) {
    case "ready":
      return applyReady(state, msg);
    case "prediction":
      return applyPrediction(state, msg, nowMs);
    case "flushed":
      return applyFlushed(state, msg);
    case "error":
      return { ...state, statusDetail: msg.message };
  }
}

export function resetTranscript(state: UiState): UiState {
  return { ...state, transcript: [], finalTokens: [] };
}

export function setStatus(state: UiState, status: ConnectionStatus, detail = ""): UiState {
  return { ...state, status, statusDetail: detail };
}

export function setCaptureFps(state: UiState, fps: number): UiState {
  return { ...state, captureFps: fps };
}

/** Sliding-window rate estimate over recent tick timestamps (milliseconds). */
export class FpsMeter {
  private ticks: number[] = [];

  constructor(private windowMs = 5000) {}

  tick(tMs: number): void {
    this.ticks.push(tMs);
    const cutoff = tMs - this.windowMs;
    while (this.ticks.length > 0 && this.ticks[0] < cutoff) {
      this.ticks.shift();
    }
  }

  estimate(): number {
    if (this.ticks.length < 2) return 0;
    const span = this.ticks[this.ticks.length - 1] - this.ticks[0];
    return span > 0 ? ((this.ticks.length - 1) / span) * 1000 : 0;
  }
}
