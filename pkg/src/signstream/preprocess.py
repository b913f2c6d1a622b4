"""Data conditioning: FPS standardization, windowing, gap filling, augmentation.

Training and inference share one resampling rule. A sequence of N frames at
source fps covers D = (N - 1) / fps seconds; resampling to a target rate
emits frames at t_k = k / target for k = 0 .. floor(D * target), each frame
linearly interpolated between its two bracketing source frames.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .landmarks import FrameRecord, HandLandmarks, PoseLandmarks, VideoSequence

log = logging.getLogger(__name__)

DEFAULT_TARGET_FPS = 5.0


@dataclass(frozen=True)
class LandmarkWindow:
    """W consecutive frames at a uniform rate; the model's atomic input."""

    frames: tuple[FrameRecord, ...]
    video_id: str
    start: int

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) < 2:
            raise ValueError("a window needs at least 2 frames")
        fps = self.frames[0].fps
        for f in self.frames:
            if f.fps != fps:
                raise ValueError("window frames must share one fps")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def fps(self) -> float:
        return self.frames[0].fps


@dataclass(frozen=True)
class AugmentConfig:
    """Knobs for plausible-data augmentation. All defaults are the identity."""

    jitter_sigma: float = 0.0
    time_offset_max: int = 0
    mirror: bool = False
    speed_range: tuple[float, float] = (1.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")
        if self.time_offset_max < 0:
            raise ValueError("time_offset_max must be >= 0")
        lo, hi = self.speed_range
        if not (0 < lo <= hi):
            raise ValueError(f"speed_range must satisfy 0 < min <= max, got {self.speed_range}")


def _lerp_block(a, b, w: float, cls):
    if a is None or b is None:
        return None
    pts = (1.0 - w) * a.points + w * b.points
    return cls(pts)


def resample(seq: VideoSequence, target_fps: float) -> VideoSequence:
    """Resample a sequence to target_fps by per-coordinate linear interpolation.

    A block absent in either bracketing frame is absent in the output frame.
    Labels ride on the nearest source frame. Equal source and target rates
    reproduce the input exactly.
    """
    if target_fps <= 0 or not math.isfinite(target_fps):
        raise ValueError(f"target_fps must be positive, got {target_fps}")
    n = len(seq.frames)
    ratio = seq.fps / target_fps
    duration = (n - 1) / seq.fps
    count = int(math.floor(duration * target_fps)) + 1

    out = []
    for k in range(count):
        u = min(k * ratio, float(n - 1))
        i0 = int(math.floor(u))
        w = u - i0
        if w == 0.0:
            src = seq.frames[i0]
            out.append(replace(src, fps=target_fps))
            continue
        a, b = seq.frames[i0], seq.frames[i0 + 1]
        nearest = b if w >= 0.5 else a
        out.append(
            FrameRecord(
                left=_lerp_block(a.left, b.left, w, HandLandmarks),
                right=_lerp_block(a.right, b.right, w, HandLandmarks),
                pose=_lerp_block(a.pose, b.pose, w, PoseLandmarks),
                video_id=seq.video_id,
                sign_id=nearest.sign_id,
                fps=target_fps,
            )
        )
    return VideoSequence(video_id=seq.video_id, fps=target_fps, frames=tuple(out), sign_id=seq.sign_id)


def make_windows(seq: VideoSequence, window: int, stride: int) -> list[LandmarkWindow]:
    """Slice a sequence into windows [i, i+window) for i = 0, stride, 2*stride, ...

    Sequences shorter than ``window`` yield an empty list.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n = len(seq.frames)
    return [
        LandmarkWindow(frames=seq.frames[i : i + window], video_id=seq.video_id, start=i)
        for i in range(0, n - window + 1, stride)
    ]


def fill_missing(win: LandmarkWindow) -> LandmarkWindow:
    """Carry the most recent present block forward over gaps within the window.

    No backward fill: leading absences stay absent, and present blocks are
    never altered. The fill never crosses window boundaries, which keeps the
    offline and streaming paths identical.
    """
    last_left = last_right = last_pose = None
    out = []
    for f in win.frames:
        left = f.left if f.left is not None else last_left
        right = f.right if f.right is not None else last_right
        pose = f.pose if f.pose is not None else last_pose
        if left is not f.left or right is not f.right or pose is not f.pose:
            f = replace(f, left=left, right=right, pose=pose)
        last_left, last_right, last_pose = left, right, pose
        out.append(f)
    return LandmarkWindow(frames=tuple(out), video_id=win.video_id, start=win.start)


_MIRROR_SCALE = np.array([-1.0, 1.0, 1.0])
_MIRROR_SHIFT = np.array([1.0, 0.0, 0.0])


def _mirror_block(block, cls):
    if block is None:
        return None
    return cls(block.points * _MIRROR_SCALE + _MIRROR_SHIFT)


def _jitter_block(block, cls, rng: np.random.Generator, sigma: float):
    if block is None:
        return None
    return cls(block.points + rng.normal(0.0, sigma, block.points.shape))


def augment(seq: VideoSequence, cfg: AugmentConfig) -> VideoSequence:
    """Produce one augmented copy of a sequence, deterministic under cfg.seed.

    Applied in order: speed perturbation, start-offset crop, Gaussian jitter
    on present coordinates, horizontal mirror (x -> 1-x on every block plus a
    left/right hand swap). With all knobs at their defaults this is the
    identity.
    """
    rng = np.random.default_rng(cfg.seed)

    lo, hi = cfg.speed_range
    speed = float(rng.uniform(lo, hi))
    if speed != 1.0:
        stretched = resample(seq, seq.fps / speed)
        frames = tuple(replace(f, fps=seq.fps) for f in stretched.frames)
        seq = VideoSequence(video_id=seq.video_id, fps=seq.fps, frames=frames, sign_id=seq.sign_id)

    if cfg.time_offset_max > 0:
        max_offset = max(0, min(cfg.time_offset_max, len(seq.frames) - 2))
        offset = int(rng.integers(0, max_offset + 1))
        if offset:
            seq = VideoSequence(
                video_id=seq.video_id, fps=seq.fps, frames=seq.frames[offset:], sign_id=seq.sign_id
            )

    if cfg.jitter_sigma > 0:
        frames = tuple(
            replace(
                f,
                left=_jitter_block(f.left, HandLandmarks, rng, cfg.jitter_sigma),
                right=_jitter_block(f.right, HandLandmarks, rng, cfg.jitter_sigma),
                pose=_jitter_block(f.pose, PoseLandmarks, rng, cfg.jitter_sigma),
            )
            for f in seq.frames
        )
        seq = VideoSequence(video_id=seq.video_id, fps=seq.fps, frames=frames, sign_id=seq.sign_id)

    if cfg.mirror:
        frames = tuple(
            replace(
                f,
                left=_mirror_block(f.right, HandLandmarks),
                right=_mirror_block(f.left, HandLandmarks),
                pose=_mirror_block(f.pose, PoseLandmarks),
            )
            for f in seq.frames
        )
        seq = VideoSequence(video_id=seq.video_id, fps=seq.fps, frames=frames, sign_id=seq.sign_id)

    return seq


def hand_present_ratio(seq: VideoSequence) -> float:
    """Fraction of frames with at least one hand block present."""
    n = sum(1 for f in seq.frames if f.left is not None or f.right is not None)
    return n / len(seq.frames)


def filter_dataset(videos: list[VideoSequence], min_present_ratio: float) -> list[VideoSequence]:
    """Drop videos whose hand-presence ratio falls below the threshold."""
    if not 0.0 <= min_present_ratio <= 1.0:
        raise ValueError("min_present_ratio must be in [0, 1]")
    kept = [v for v in videos if hand_present_ratio(v) >= min_present_ratio]
    dropped = len(videos) - len(kept)
    if dropped:
        log.info("filter_dataset dropped %d of %d videos (min_present_ratio=%.3f)", dropped, len(videos), min_present_ratio)
    return kept
