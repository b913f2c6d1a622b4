"""Builders for random landmark data used across the test modules."""

from __future__ import annotations

import numpy as np

from signstream.landmarks import (
    HAND_POINTS,
    POSE_POINTS,
    FrameRecord,
    HandLandmarks,
    PoseLandmarks,
    VideoSequence,
)
from signstream.preprocess import LandmarkWindow


def rand_hand(rng) -> HandLandmarks:
    return HandLandmarks(rng.uniform(0.0, 1.0, (HAND_POINTS, 3)))


def rand_pose(rng) -> PoseLandmarks:
    return PoseLandmarks(rng.uniform(0.0, 1.0, (POSE_POINTS, 3)))


def rand_frame(
    rng,
    video_id: str = "v0",
    sign_id: int = 0,
    fps: float = 24.0,
    p_left: float = 1.0,
    p_right: float = 1.0,
    p_pose: float = 1.0,
) -> FrameRecord:
    """One frame; each block present with the given probability."""
    return FrameRecord(
        left=rand_hand(rng) if rng.random() < p_left else None,
        right=rand_hand(rng) if rng.random() < p_right else None,
        pose=rand_pose(rng) if rng.random() < p_pose else None,
        video_id=video_id,
        sign_id=sign_id,
        fps=fps,
    )


def rand_window(rng, n: int = 2, present: float = 1.0, video_id: str = "v0") -> LandmarkWindow:
    frames = tuple(
        rand_frame(rng, video_id=video_id, p_left=present, p_right=present, p_pose=present)
        for _ in range(n)
    )
    return LandmarkWindow(frames=frames, video_id=video_id, start=0)


def rand_video(
    rng,
    n: int = 12,
    video_id: str = "v0",
    sign_id: int = 1,
    fps: float = 24.0,
    present: float = 1.0,
) -> VideoSequence:
    frames = tuple(
        rand_frame(
            rng, video_id=video_id, sign_id=sign_id, fps=fps,
            p_left=present, p_right=present, p_pose=present,
        )
        for _ in range(n)
    )
    return VideoSequence(video_id=video_id, fps=fps, frames=frames, sign_id=sign_id)


def transform_points(points: np.ndarray, rotation: np.ndarray | None = None,
                     scale: float = 1.0, offset=(0.0, 0.0, 0.0)) -> np.ndarray:
    out = points if rotation is None else points @ rotation.T
    return out * scale + np.asarray(offset, dtype=float)


def random_rotation(rng) -> np.ndarray:
    """Uniform random 3x3 rotation via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
