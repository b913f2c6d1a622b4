"""Online resampler, stream sessions, and the WebSocket/NDJSON service."""

import json
import socket

import numpy as np
import pytest
from fastapi.testclient import TestClient

from signstream.decoder import CollocationLexicon, DecoderConfig
from signstream.pipeline import decode_video
from signstream.preprocess import resample
from signstream.service import OnlineResampler, StreamSession, create_app

from helpers import rand_video

EAGER = DecoderConfig(confidence_threshold=1e-9, min_run=1)


def assert_frames_equal(got, want):
    assert len(got) == len(want)
    for g, w in zip(got, want):
        for attr in ("left", "right", "pose"):
            gb, wb = getattr(g, attr), getattr(w, attr)
            assert (gb is None) == (wb is None)
            if gb is not None:
                np.testing.assert_array_equal(gb.points, wb.points)
        assert g.sign_id == w.sign_id
        assert g.fps == w.fps


def frame_msg(frame, t_ms=None):
    def block(b):
        return None if b is None else b.points.tolist()

    return {
        "type": "frame",
        "t_ms": t_ms,
        "left": block(frame.left),
        "right": block(frame.right),
        "pose": block(frame.pose),
    }


def replay(session, video):
    """Feed a whole video through a session; returns (replies, flushed)."""
    session.handle_message({"type": "hello", "fps": video.fps})
    replies = [session.handle_message(frame_msg(f)) for f in video.frames]
    return replies, session.handle_message({"type": "flush"})


@pytest.mark.parametrize("src_fps", [24.0, 30.0, 23.7, 5.0, 4.0])
def test_online_resampler_matches_offline(src_fps):
    rng = np.random.default_rng(int(src_fps * 10))
    video = rand_video(rng, n=30, fps=src_fps, present=0.8, video_id="r")
    rs = OnlineResampler(src_fps, 5.0)
    got = []
    for f in video.frames:
        got.extend(rs.push(f))
    got.extend(rs.finish())
    assert_frames_equal(got, list(resample(video, 5.0).frames))


def test_online_resampler_emission_schedule():
    # 24 -> 5 fps: output k sits at source 4.8k, available one push after
    # its bracketing frame arrives
    rng = np.random.default_rng(0)
    video = rand_video(rng, n=24, video_id="s")
    rs = OnlineResampler(24.0, 5.0)
    emitted_at = [len(rs.push(f)) for f in video.frames]
    assert [i + 1 for i, n in enumerate(emitted_at) if n] == [1, 6, 11, 16, 21]
    assert rs.finish() == []


def test_online_resampler_buffer_stays_bounded():
    rng = np.random.default_rng(1)
    video = rand_video(rng, n=200, video_id="b")
    rs = OnlineResampler(24.0, 5.0)
    for f in video.frames:
        rs.push(f)
        assert len(rs._frames) <= 7  # about one output stride of backlog


def test_online_resampler_validation():
    with pytest.raises(ValueError):
        OnlineResampler(0.0, 5.0)
    with pytest.raises(ValueError):
        OnlineResampler(24.0, float("inf"))
    assert OnlineResampler(24.0, 5.0).finish() == []


def test_session_hello_and_ready(tiny_model):
    session = StreamSession(tiny_model)
    reply = session.handle_message({"type": "hello", "fps": 24})
    assert reply == {
        "type": "ready",
        "target_fps": 5.0,
        "window": 2,
        "class_count": tiny_model.config.class_count,
    }


def test_session_rejects_bad_messages(tiny_model):
    session = StreamSession(tiny_model)
    assert "invalid JSON" in session.handle_text("{oops")["message"]
    assert session.handle_text('"just a string"')["type"] == "error"
    assert "unknown message type" in session.handle_text('{"type": "nope"}')["message"]
    for fps in ('"fast"', "true", "0", "-3"):
        reply = session.handle_text('{"type": "hello", "fps": %s}' % fps)
        assert reply["type"] == "error"
    # errors never close the session
    assert session.handle_message({"type": "hello", "fps": 24})["type"] == "ready"


def test_session_frame_before_hello_errors(tiny_model):
    session = StreamSession(tiny_model)
    reply = session.handle_text(json.dumps({"type": "frame", "left": None}))
    assert reply["type"] == "error" and "hello" in reply["message"]


def test_session_validates_frame_blocks(tiny_model, synth_dataset):
    session = StreamSession(tiny_model)
    session.handle_message({"type": "hello", "fps": 24})
    bad = {"type": "frame", "left": [[0, 0, 0]] * 20, "right": None, "pose": None}
    reply = session.handle_text(json.dumps(bad))
    assert reply["type"] == "error" and "left" in reply["message"]
    nan_block = [[None, 0, 0]] + [[0, 0, 0]] * 20
    reply = session.handle_text(json.dumps({"type": "frame", "right": nan_block}))
    assert reply["type"] == "error" and "right" in reply["message"]
    reply = session.handle_text(json.dumps({"type": "frame", "pose": "zzz"}))
    assert reply["type"] == "error"


def test_session_prediction_timing(tiny_model, synth_dataset):
    videos, _ = synth_dataset
    video = videos[0]
    assert video.fps == 24.0
    session = StreamSession(tiny_model, decoder_config=EAGER)
    session.handle_message({"type": "hello", "fps": video.fps})
    replies = [
        session.handle_message(frame_msg(f, t_ms=41 * i + 3))
        for i, f in enumerate(video.frames[:12])
    ]
    # window=2 needs the 2nd resampled frame, which lands on source push 6
    assert [r is not None for r in replies[:6]] == [False] * 5 + [True]
    pred = replies[5]
    assert pred["type"] == "prediction" and pred["t_ms"] == 41 * 5 + 3
    ids = tiny_model.class_ids
    ps = [t["p"] for t in pred["top"]]
    assert ps == sorted(ps, reverse=True)
    assert len(pred["top"]) == min(5, len(ids))
    for t in pred["top"]:
        assert t["sign_id"] in ids and isinstance(t["gloss"], str) and 0 <= t["p"] <= 1
    assert all(isinstance(g, str) for g in pred["emitted"])


def test_session_flush_resets_but_keeps_fps(tiny_model, synth_dataset):
    videos, _ = synth_dataset
    video = videos[0]
    session = StreamSession(tiny_model, decoder_config=EAGER)
    first_replies, first_flush = replay(session, video)
    assert first_flush["type"] == "flushed"
    assert all(isinstance(s, int) for s in first_flush["sign_ids"])
    assert len(first_flush["tokens"]) == len(first_flush["sign_ids"])
    # no hello needed for the next stream: fps is retained, state is fresh
    second_replies = [session.handle_message(frame_msg(f)) for f in video.frames]
    second_flush = session.handle_message({"type": "flush"})
    assert [r is None for r in second_replies] == [r is None for r in first_replies]
    assert second_flush["sign_ids"] == first_flush["sign_ids"]


def test_session_flush_before_hello(tiny_model):
    session = StreamSession(tiny_model)
    assert session.handle_message({"type": "flush"}) == {
        "type": "flushed",
        "sign_ids": [],
        "tokens": [],
    }


def test_session_matches_offline_decode(tiny_model, synth_dataset):
    videos, _ = synth_dataset
    lex = CollocationLexicon({(2, 3): 9})
    for video in videos[:6]:
        session = StreamSession(tiny_model, decoder_config=EAGER, lexicon=lex)
        _, flushed = replay(session, video)
        offline = decode_video(tiny_model, video, cfg=EAGER, lexicon=lex)
        assert flushed["sign_ids"] == offline, video.video_id


def test_sessions_are_isolated(tiny_model, synth_dataset):
    videos, _ = synth_dataset
    va, vb = videos[0], videos[5]
    alone_a = replay(StreamSession(tiny_model, decoder_config=EAGER), va)[1]
    alone_b = replay(StreamSession(tiny_model, decoder_config=EAGER), vb)[1]

    sa = StreamSession(tiny_model, decoder_config=EAGER)
    sb = StreamSession(tiny_model, decoder_config=EAGER)
    sa.handle_message({"type": "hello", "fps": va.fps})
    sb.handle_message({"type": "hello", "fps": vb.fps})
    for fa, fb in zip(va.frames, vb.frames):
        sa.handle_message(frame_msg(fa))
        sb.handle_message(frame_msg(fb))
    for f in va.frames[len(vb.frames) :]:
        sa.handle_message(frame_msg(f))
    for f in vb.frames[len(va.frames) :]:
        sb.handle_message(frame_msg(f))
    assert sa.handle_message({"type": "flush"})["sign_ids"] == alone_a["sign_ids"]
    assert sb.handle_message({"type": "flush"})["sign_ids"] == alone_b["sign_ids"]


def test_session_buffer_is_bounded(tiny_model, synth_dataset):
    videos, _ = synth_dataset
    session = StreamSession(tiny_model, window=3)
    session.handle_message({"type": "hello", "fps": 24})
    for f in videos[0].frames:
        session.handle_message(frame_msg(f))
    assert session.buffer.maxlen == 3 and len(session.buffer) <= 3
    with pytest.raises(ValueError):
        StreamSession(tiny_model, window=1)


def test_healthz(tiny_model):
    app = create_app(tiny_model)
    with TestClient(app) as client:
        body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert body["class_count"] == tiny_model.config.class_count
    assert body["model_size_bytes"] > 0
    assert isinstance(body["format_version"], int)
    assert body["encoder_backend"] in ("cython", "python")
    assert body["target_fps"] == 5.0 and body["window"] == 2


def test_websocket_stream_matches_offline(tiny_model, synth_dataset):
    videos, _ = synth_dataset
    app = create_app(tiny_model, decoder_config=EAGER)
    with TestClient(app) as client:
        for video in videos[:3]:
            with client.websocket_connect("/stream") as ws:
                ws.send_text(json.dumps({"type": "hello", "fps": video.fps}))
                assert ws.receive_json()["type"] == "ready"
                for f in video.frames:
                    ws.send_text(json.dumps(frame_msg(f)))
                ws.send_text(json.dumps({"type": "flush"}))
                predictions = []
                while True:
                    msg = ws.receive_json()
                    if msg["type"] == "flushed":
                        break
                    assert msg["type"] == "prediction"
                    predictions.append(msg)
            offline = decode_video(tiny_model, video, cfg=EAGER)
            assert msg["sign_ids"] == offline
            # stride-1 windows: one prediction per resampled frame after warmup
            n_resampled = len(resample(video, 5.0).frames)
            assert len(predictions) == max(0, n_resampled - 1)


def test_websocket_error_keeps_session(tiny_model):
    app = create_app(tiny_model)
    with TestClient(app) as client:
        with client.websocket_connect("/stream") as ws:
            ws.send_text("{bad json")
            assert ws.receive_json()["type"] == "error"
            ws.send_text(json.dumps({"type": "hello", "fps": 30}))
            assert ws.receive_json()["type"] == "ready"


def test_static_dir_served(tiny_model, tmp_path):
    (tmp_path / "index.html").write_text("<h1>signstream</h1>", encoding="utf-8")
    app = create_app(tiny_model, static_dir=tmp_path)
    with TestClient(app) as client:
        resp = client.get("/")
        assert resp.status_code == 200 and "signstream" in resp.text
        assert client.get("/healthz").json()["status"] == "ok"


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_ndjson_listener(tiny_model):
    port = _free_port()
    app = create_app(tiny_model, ndjson_port=port)
    with TestClient(app):
        with socket.create_connection(("127.0.0.1", port), timeout=5) as conn:
            fh = conn.makefile("rwb")

            def ask(obj):
                fh.write((json.dumps(obj) + "\n").encode())
                fh.flush()
                return json.loads(fh.readline())

            assert ask({"type": "hello", "fps": 24})["type"] == "ready"
            assert ask({"type": "nonsense"})["type"] == "error"
            flushed = ask({"type": "flush"})
            assert flushed == {"type": "flushed", "sign_ids": [], "tokens": []}
    # listener goes down with the app
    with pytest.raises(OSError):
        socket.create_connection(("127.0.0.1", port), timeout=0.5)
