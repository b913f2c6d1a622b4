"""Real-time recognition service.

The primary transport is a WebSocket at /stream speaking JSON text
messages; a newline-delimited-JSON TCP listener can run alongside for
headless clients. Both speak the same protocol:

    -> {"type": "hello", "fps": 30}
    <- {"type": "ready", "target_fps": 5.0, "window": 2, "class_count": 20}
    -> {"type": "frame", "t_ms": 123, "left": [[x,y,z] x21] | null,
        "right": ..., "pose": [[x,y,z] x25] | null}
    <- {"type": "prediction", "t_ms": 123,
        "top": [{"sign_id": 7, "gloss": "S007", "p": 0.93}, ...],
        "emitted": ["S007"]}                     (only when a window filled)
    -> {"type": "flush"}
    <- {"type": "flushed", "sign_ids": [7, 12], "tokens": ["S007", "S012"]}

Malformed input gets {"type": "error", "message": ...} and the session
stays open. Frames are resampled to the target rate on the server using
the declared source fps, walking the same interpolation grid as the
offline resampler so a replayed recording decodes identically.
"""

from __future__ import annotations

import asyncio
import json
import logging
import math
from collections import deque
from contextlib import asynccontextmanager
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .decoder import CollocationLexicon, DecoderConfig, StreamDecoder
from .features import active_backend, encode_window
from .landmarks import HAND_POINTS, POSE_POINTS, FrameRecord, HandLandmarks, PoseLandmarks
from .net import FORMAT_VERSION, Model, model_file_size
from .pipeline import DEFAULT_WINDOW
from .preprocess import DEFAULT_TARGET_FPS, LandmarkWindow, _lerp_block, fill_missing

log = logging.getLogger(__name__)

DEFAULT_TOP_K = 5


class OnlineResampler:
    """Incremental twin of preprocess.resample.

    Output frame k sits at source position u = k * src/target and is
    emitted as soon as its bracketing source frames have arrived. When the
    stream ends, finish() emits the duration-clamped tail frame the
    offline resampler would produce, so a fully replayed video resamples
    identically to the batch path.
    """

    def __init__(self, src_fps: float, target_fps: float, video_id: str = "stream"):
        if src_fps <= 0 or not math.isfinite(src_fps):
            raise ValueError(f"source fps must be positive, got {src_fps}")
        if target_fps <= 0 or not math.isfinite(target_fps):
            raise ValueError(f"target fps must be positive, got {target_fps}")
        self.src_fps = float(src_fps)
        self.target_fps = float(target_fps)
        self.ratio = self.src_fps / self.target_fps
        self.video_id = video_id
        self._frames: list[FrameRecord] = []
        self._base = 0  # source index of _frames[0]
        self._pushed = 0
        self._k = 0  # next output index

    def _src(self, i: int) -> FrameRecord:
        return self._frames[i - self._base]

    def _emit(self, u: float) -> FrameRecord:
        i0 = int(math.floor(u))
        w = u - i0
        if w == 0.0:
            return replace(self._src(i0), fps=self.target_fps)
        a, b = self._src(i0), self._src(i0 + 1)
        nearest = b if w >= 0.5 else a
        return FrameRecord(
            left=_lerp_block(a.left, b.left, w, HandLandmarks),
            right=_lerp_block(a.right, b.right, w, HandLandmarks),
            pose=_lerp_block(a.pose, b.pose, w, PoseLandmarks),
            video_id=self.video_id,
            sign_id=nearest.sign_id,
            fps=self.target_fps,
        )

    def push(self, frame: FrameRecord) -> list[FrameRecord]:
        """Add one source frame; returns the output frames now computable."""
        self._frames.append(frame)
        self._pushed += 1
        out = []
        while True:
            u = self._k * self.ratio
            i0 = int(math.floor(u))
            need = i0 if u == i0 else i0 + 1
            if need > self._pushed - 1:
                break
            out.append(self._emit(u))
            self._k += 1
            keep_from = int(math.floor(self._k * self.ratio))
            while self._base < keep_from and len(self._frames) > 1:
                self._frames.pop(0)
                self._base += 1
        return out

    def finish(self) -> list[FrameRecord]:
        """Emit whatever the offline resampler would still produce for the
        now-complete stream."""
        if self._pushed == 0:
            return []
        n = self._pushed
        duration = (n - 1) / self.src_fps
        count = int(math.floor(duration * self.target_fps)) + 1
        out = []
        while self._k < count:
            u = min(self._k * self.ratio, float(n - 1))
            out.append(self._emit(u))
            self._k += 1
        return out


def _parse_block(value, n_points: int, cls, name: str):
    if value is None:
        return None
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a {n_points}x3 array of numbers") from None
    if arr.shape != (n_points, 3):
        raise ValueError(f"{name} must have shape {n_points}x3, got {list(arr.shape)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return cls(arr)


class StreamSession:
    """One client stream: negotiated fps, rolling window, decoder state.

    Transport-agnostic: handle_text maps one inbound message to at most
    one reply dict. All compute is synchronous; transports offload it.
    """

    def __init__(
        self,
        model: Model,
        decoder_config: DecoderConfig | None = None,
        lexicon: CollocationLexicon | None = None,
        target_fps: float = DEFAULT_TARGET_FPS,
        window: int = DEFAULT_WINDOW,
        top_k: int = DEFAULT_TOP_K,
    ):
        if window < 2:
            raise ValueError(f"window must be >= 2, got {window}")
        self.model = model
        self.decoder_config = decoder_config if decoder_config is not None else DecoderConfig()
        self.lexicon = lexicon
        self.target_fps = target_fps
        self.window = window
        self.top_k = top_k
        self.resampler: OnlineResampler | None = None
        self.buffer: deque[FrameRecord] = deque(maxlen=window)
        self.decoder = StreamDecoder(self.decoder_config, lexicon, class_ids=model.class_ids)
        self._resampled = 0

    def handle_text(self, text: str) -> dict | None:
        try:
            msg = json.loads(text)
        except json.JSONDecodeError as exc:
            return {"type": "error", "message": f"invalid JSON: {exc.msg}"}
        try:
            return self.handle_message(msg)
        except ValueError as exc:
            return {"type": "error", "message": str(exc)}

    def handle_message(self, msg) -> dict | None:
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            raise ValueError("message must be a JSON object with a string 'type'")
        kind = msg["type"]
        if kind == "hello":
            return self._hello(msg)
        if kind == "frame":
            return self._frame(msg)
        if kind == "flush":
            return self._flush()
        raise ValueError(f"unknown message type {kind!r}")

    def _reset_stream(self, src_fps: float) -> None:
        self.resampler = OnlineResampler(src_fps, self.target_fps)
        self.buffer.clear()
        self.decoder = StreamDecoder(self.decoder_config, self.lexicon, class_ids=self.model.class_ids)
        self._resampled = 0

    def _hello(self, msg) -> dict:
        fps = msg.get("fps")
        if not isinstance(fps, (int, float)) or isinstance(fps, bool):
            raise ValueError("hello requires a numeric 'fps'")
        if not (fps > 0 and math.isfinite(fps)):
            raise ValueError(f"fps must be positive and finite, got {fps}")
        self._reset_stream(float(fps))
        return {
            "type": "ready",
            "target_fps": self.target_fps,
            "window": self.window,
            "class_count": self.model.config.class_count,
        }

    def _frame(self, msg) -> dict | None:
        if self.resampler is None:
            raise ValueError("a hello message with the source fps must precede frames")
        frame = FrameRecord(
            left=_parse_block(msg.get("left"), HAND_POINTS, HandLandmarks, "left"),
            right=_parse_block(msg.get("right"), HAND_POINTS, HandLandmarks, "right"),
            pose=_parse_block(msg.get("pose"), POSE_POINTS, PoseLandmarks, "pose"),
            video_id=self.resampler.video_id,
            sign_id=0,
            fps=self.resampler.src_fps,
        )
        top, emitted = self._consume(self.resampler.push(frame))
        if top is None:
            return None
        return {
            "type": "prediction",
            "t_ms": msg.get("t_ms"),
            "top": top,
            "emitted": [self._gloss(s) for s in emitted],
        }

    def _consume(self, new_frames) -> tuple[list | None, list[int]]:
        """Run every newly resampled frame through the window and decoder."""
        top = None
        emitted = []
        for rf in new_frames:
            self.buffer.append(rf)
            self._resampled += 1
            if len(self.buffer) < self.window:
                continue
            win = LandmarkWindow(
                frames=tuple(self.buffer),
                video_id=self.resampler.video_id,
                start=self._resampled - self.window,
            )
            probs = self.model.forward(encode_window(fill_missing(win)))
            sign_id = self.decoder.push(probs)
            if sign_id is not None:
                emitted.append(sign_id)
            top = self._top_list(probs)
        return top, emitted

    def _top_list(self, probs: np.ndarray) -> list[dict]:
        order = np.argsort(-probs, kind="stable")[: self.top_k]
        return [
            {
                "sign_id": int(self.model.class_ids[i]),
                "gloss": self.model.glosses[i],
                "p": float(probs[i]),
            }
            for i in order
        ]

    def _gloss(self, sign_id: int) -> str:
        try:
            return self.model.glosses[self.model.class_ids.index(sign_id)]
        except ValueError:
            return f"sign_{sign_id}"

    def _flush(self) -> dict:
        if self.resampler is not None:
            self._consume(self.resampler.finish())
            src_fps = self.resampler.src_fps
        else:
            src_fps = None
        sign_ids = self.decoder.flush()
        if src_fps is not None:
            self._reset_stream(src_fps)
        return {
            "type": "flushed",
            "sign_ids": [int(s) for s in sign_ids],
            "tokens": [self._gloss(s) for s in sign_ids],
        }


def create_app(
    model: Model,
    decoder_config: DecoderConfig | None = None,
    lexicon: CollocationLexicon | None = None,
    target_fps: float = DEFAULT_TARGET_FPS,
    window: int = DEFAULT_WINDOW,
    top_k: int = DEFAULT_TOP_K,
    static_dir=None,
    ndjson_port: int | None = None,
    ndjson_host: str = "127.0.0.1",
) -> FastAPI:
    """Assemble the service around one shared read-only model.

    static_dir, when given, is served at / (the browser client). With
    ndjson_port set, a newline-delimited-JSON TCP listener speaking the
    same protocol runs for the app's lifespan.
    """

    def make_session() -> StreamSession:
        return StreamSession(
            model,
            decoder_config=decoder_config,
            lexicon=lexicon,
            target_fps=target_fps,
            window=window,
            top_k=top_k,
        )

    async def ndjson_conn(reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        session = make_session()
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                text = line.decode("utf-8", errors="replace").strip()
                if not text:
                    continue
                reply = await asyncio.to_thread(session.handle_text, text)
                if reply is not None:
                    writer.write((json.dumps(reply) + "\n").encode("utf-8"))
                    await writer.drain()
        except ConnectionResetError:
            pass
        finally:
            writer.close()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        server = None
        if ndjson_port is not None:
            server = await asyncio.start_server(ndjson_conn, ndjson_host, ndjson_port)
            log.info("ndjson listener on %s:%d", ndjson_host, ndjson_port)
        try:
            yield
        finally:
            if server is not None:
                server.close()
                await server.wait_closed()

    app = FastAPI(title="signstream", docs_url=None, redoc_url=None, lifespan=lifespan)

    @app.get("/healthz")
    async def healthz():
        return {
            "status": "ok",
            "class_count": model.config.class_count,
            "model_size_bytes": model_file_size(model),
            "format_version": FORMAT_VERSION,
            "encoder_backend": active_backend(),
            "target_fps": target_fps,
            "window": window,
        }

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        session = make_session()
        try:
            while True:
                text = await ws.receive_text()
                reply = await asyncio.to_thread(session.handle_text, text)
                if reply is not None:
                    await ws.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            pass

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
