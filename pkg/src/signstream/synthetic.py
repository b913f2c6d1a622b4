"""Synthetic sign videos for desk-scale training and acceptance tests.

Each class is a distinct (handshape, motion path, palm rotation) triple
rendered as a parametric skeleton: a fanned five-finger hand whose curl,
orientation and trajectory vary per class, with per-sample jitter, speed
variation and random landmark dropout standing in for tracker noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .landmarks import (
    FrameRecord,
    HandLandmarks,
    PoseLandmarks,
    SignClass,
    SignRegistry,
    VideoSequence,
)

# Canonical hand geometry: finger bases fanned around the wrist, three
# phalanx segments each, curled out of the palm plane.
_FINGER_BASE = (1, 5, 9, 13, 17)
_FAN = np.deg2rad((-55.0, -15.0, 0.0, 15.0, 32.0))
_MCP_RADIUS = (0.30, 0.42, 0.44, 0.42, 0.38)
_SEGMENTS = (
    (0.16, 0.12, 0.10),
    (0.20, 0.12, 0.08),
    (0.22, 0.13, 0.09),
    (0.20, 0.12, 0.08),
    (0.16, 0.10, 0.07),
)
_BEND_PER_JOINT = 0.9  # radians at full curl

_CENTER = np.array([0.5, 0.45, 0.0])
_RIGHT_REST = np.array([0.42, 0.48, 0.02])
_HAND_SIZE = 0.10
_PATH_AMPLITUDE = 0.12
_SHOULDER_HALF = 0.15


@dataclass(frozen=True)
class SignTemplate:
    """Generative parameters of one synthetic sign class."""

    sign_id: int
    gloss: str
    curls: tuple[float, ...]  # per-finger, 0 straight to 1 fist
    path_angle: float  # radians, direction of travel in the image plane
    path_arc: float  # perpendicular bulge, signed
    palm_axis: tuple[float, float, float]
    palm_angle: float
    two_handed: bool
    base_offset: tuple[float, float, float]

    def __post_init__(self):
        if self.sign_id < 1:
            raise ValueError("synthetic sign ids start at 1 (0 is reserved)")
        if len(self.curls) != 5:
            raise ValueError("curls must hold one value per finger")


def hand_points(curls, size: float = 1.0) -> np.ndarray:
    """21 hand landmarks in the canonical frame: wrist at the origin,
    fingers fanned along +y, curling toward +z."""
    pts = np.zeros((21, 3))
    for f in range(5):
        direction = np.array([np.sin(_FAN[f]), np.cos(_FAN[f]), 0.0])
        pos = _MCP_RADIUS[f] * direction
        pts[_FINGER_BASE[f]] = pos
        for s in range(3):
            bend = curls[f] * _BEND_PER_JOINT * (s + 1)
            seg_dir = np.cos(bend) * direction + np.sin(bend) * np.array([0.0, 0.0, 1.0])
            pos = pos + _SEGMENTS[f][s] * seg_dir
            pts[_FINGER_BASE[f] + s + 1] = pos
    return pts * size


def _rotation(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix about a (not necessarily unit) axis."""
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        return np.eye(3)
    x, y, z = axis / norm
    k = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def _base_pose() -> np.ndarray:
    """A static upper body; only the shoulders matter to the encoder."""
    pts = np.zeros((25, 3))
    pts[:] = _CENTER + np.array([0.0, -0.15, 0.0])
    head = _CENTER + np.array([0.0, -0.28, 0.0])
    pts[0] = head
    for i in range(1, 11):  # face points scattered around the head
        ang = 2 * np.pi * i / 10
        pts[i] = head + 0.03 * np.array([np.cos(ang), np.sin(ang), 0.0])
    pts[11] = _CENTER + np.array([+_SHOULDER_HALF, -0.12, 0.0])  # left shoulder
    pts[12] = _CENTER + np.array([-_SHOULDER_HALF, -0.12, 0.0])  # right shoulder
    pts[13] = pts[11] + np.array([0.03, 0.14, 0.0])  # elbows
    pts[14] = pts[12] + np.array([-0.03, 0.14, 0.0])
    for i in range(15, 25):  # wrist / hand stubs below the elbows
        side = 1.0 if i % 2 == 1 else -1.0
        pts[i] = _CENTER + np.array([side * 0.20, 0.10 + 0.01 * (i - 15), 0.0])
    return pts


_POSE_TEMPLATE = _base_pose()


def make_templates(class_count: int, seed: int = 0) -> list[SignTemplate]:
    """Deterministic class templates with ids 1..class_count."""
    if class_count < 2:
        raise ValueError(f"class_count must be >= 2, got {class_count}")
    rng = np.random.default_rng(seed)
    templates = []
    for c in range(1, class_count + 1):
        curls = tuple(rng.integers(0, 3, size=5) / 2.0)
        angle = 2 * np.pi * (c - 1) / class_count + rng.normal(0.0, 0.05)
        axis = rng.normal(size=3)
        templates.append(
            SignTemplate(
                sign_id=c,
                gloss=f"S{c:03d}",
                curls=curls,
                path_angle=float(angle),
                path_arc=float(rng.uniform(-0.5, 0.5)),
                palm_axis=tuple(axis / np.linalg.norm(axis)),
                palm_angle=float(rng.uniform(-1.0, 1.0)),
                two_handed=bool(c % 3 == 0),
                base_offset=tuple(rng.uniform(-0.04, 0.04, size=3) * np.array([1, 1, 0.2])),
            )
        )
    return templates


def registry_for(templates) -> SignRegistry:
    return SignRegistry(
        SignClass(
            sign_id=t.sign_id,
            gloss=t.gloss,
            english=t.gloss.lower(),
            handedness="two" if t.two_handed else "one",
            symmetric=t.two_handed,
            handshape_tags=("curl_" + "".join(str(int(c * 2)) for c in t.curls),),
        )
        for t in templates
    )


def _path_point(template: SignTemplate, t: float) -> np.ndarray:
    direction = np.array([np.cos(template.path_angle), np.sin(template.path_angle), 0.0])
    perp = np.array([-direction[1], direction[0], 0.0])
    along = _PATH_AMPLITUDE * (t - 0.5) * direction
    bulge = _PATH_AMPLITUDE * template.path_arc * np.sin(np.pi * t) * perp
    return _RIGHT_REST + np.asarray(template.base_offset) + along + bulge


def sample_video(
    template: SignTemplate,
    video_id: str,
    fps: float,
    rng,
    jitter: float = 0.004,
    dropout: float = 0.02,
) -> VideoSequence:
    """One noisy rendition of a sign: speed, start offset, jitter and
    landmark dropout drawn from rng."""
    speed = rng.uniform(0.75, 1.3)
    n = max(2, int(round(fps * rng.uniform(1.6, 2.4) / speed)))
    t0 = rng.uniform(0.0, 0.08)
    t1 = 1.0 - rng.uniform(0.0, 0.08)
    wobble = _rotation(rng.normal(size=3), rng.normal(0.0, 0.06))
    rot = wobble @ _rotation(template.palm_axis, template.palm_angle)
    local = hand_points(template.curls, size=_HAND_SIZE)
    placement = rng.normal(0.0, 0.015, size=3) * np.array([1, 1, 0.2])

    frames = []
    for k in range(n):
        t = t0 + (t1 - t0) * (k / (n - 1))
        pos = _path_point(template, t) + placement
        right_pts = local @ rot.T + pos
        right_pts = right_pts + rng.normal(0.0, jitter, size=(21, 3))
        right = HandLandmarks(right_pts)

        left = None
        if template.two_handed:
            # The left hand mirrors the right about the signer's midline.
            left_pts = right_pts * np.array([-1.0, 1.0, 1.0])
            left_pts[:, 0] += 2.0 * _CENTER[0]
            left_pts = left_pts + rng.normal(0.0, jitter, size=(21, 3))
            left = HandLandmarks(left_pts)

        pose_pts = _POSE_TEMPLATE + rng.normal(0.0, jitter, size=(25, 3))
        pose = PoseLandmarks(pose_pts)

        if dropout > 0:
            if rng.random() < dropout:
                right = None
            if left is not None and rng.random() < dropout:
                left = None
            if rng.random() < dropout / 2:
                pose = None
        frames.append(
            FrameRecord(
                left=left,
                right=right,
                pose=pose,
                video_id=video_id,
                sign_id=template.sign_id,
                fps=fps,
            )
        )
    return VideoSequence(
        video_id=video_id, fps=fps, frames=tuple(frames), sign_id=template.sign_id
    )


def gen_synthetic(
    class_count: int,
    samples_per_class: int,
    fps: float = 24.0,
    seed: int = 0,
    jitter: float = 0.004,
    dropout: float = 0.02,
) -> tuple[list[VideoSequence], SignRegistry]:
    """Generate a labeled corpus: samples_per_class videos for each of
    class_count classes, deterministic under seed."""
    if samples_per_class < 1:
        raise ValueError(f"samples_per_class must be >= 1, got {samples_per_class}")
    templates = make_templates(class_count, seed=seed)
    rng = np.random.default_rng(seed + 1)
    videos = []
    for template in templates:
        for k in range(samples_per_class):
            video_id = f"syn{template.sign_id:03d}_{k:03d}"
            videos.append(
                sample_video(template, video_id, fps, rng, jitter=jitter, dropout=dropout)
            )
    return videos, registry_for(templates)
