"""ASL parameter encoding: landmark windows to 947-entry feature vectors.

The encoder reads only the endpoint frames of a window. Locations, both
handshapes and palm orientation come from the last frame; movement is the
displacement between the first and last frames, each expressed in its own
body frame. A compiled kernel carries the hot path when the extension is
built; a numpy fallback computes identical values.

Set ``SIGNSTREAM_ENCODER=python`` or ``=cython`` before import to force a
backend; by default the compiled kernel is used when available.
"""

from __future__ import annotations

import os
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..landmarks import FrameRecord, HandLandmarks, PoseLandmarks
from ..preprocess import LandmarkWindow
from . import _reference
from .layout import FEATURE_LENGTH

_BACKEND_ENV = "SIGNSTREAM_ENCODER"


def _select_backend():
    choice = os.environ.get(_BACKEND_ENV, "").strip().lower()
    if choice not in ("", "python", "cython"):
        raise ValueError(
            f"{_BACKEND_ENV} must be 'python' or 'cython', got {choice!r}"
        )
    if choice == "python":
        return _reference, "python"
    try:
        from . import _kernels
    except ImportError:
        if choice == "cython":
            raise ImportError(
                "compiled encoder requested via SIGNSTREAM_ENCODER=cython "
                "but the extension is not built"
            ) from None
        return _reference, "python"
    return _kernels, "cython"


_IMPL, _BACKEND_NAME = _select_backend()

# Placeholder blocks passed to the kernel for absent hands or pose; the
# presence flags keep it from ever reading them.
_ABSENT_HAND = np.zeros((21, 3))
_ABSENT_HAND.setflags(write=False)
_ABSENT_POSE = np.zeros((25, 3))
_ABSENT_POSE.setflags(write=False)


def active_backend() -> str:
    """Name of the encoder backend selected at import: "cython" or "python"."""
    return _BACKEND_NAME


@dataclass(frozen=True, eq=False)
class BodyFrame:
    """Signer-centric reference frame.

    Origin is the shoulder midpoint, scale the shoulder distance. When the
    shoulders are missing or coincident the frame degenerates to origin zero
    (or the midpoint) with scale 1 and ``degenerate`` set.
    """

    origin: np.ndarray
    scale: float
    degenerate: bool = False


def _identity_frame() -> BodyFrame:
    return BodyFrame(origin=np.zeros(3), scale=1.0, degenerate=True)


def body_frame(pose: PoseLandmarks | None) -> BodyFrame:
    """Body frame of a pose block; the identity frame when pose is absent."""
    if pose is None:
        return _identity_frame()
    origin, scale, degenerate = _reference.body_frame_of(pose.points)
    return BodyFrame(origin=origin, scale=scale, degenerate=degenerate)


def location_hand(hand: HandLandmarks | None, frame: BodyFrame) -> np.ndarray:
    """63 body-frame hand coordinates; zeros when the hand is absent."""
    if hand is None:
        return np.zeros(63)
    return _reference.location(hand.points, frame.origin, frame.scale)


def location_pose(pose: PoseLandmarks | None, frame: BodyFrame) -> np.ndarray:
    """75 body-frame pose coordinates; zeros when the pose is absent."""
    if pose is None:
        return np.zeros(75)
    return _reference.location(pose.points, frame.origin, frame.scale)


def handshape(hand: HandLandmarks | None) -> np.ndarray:
    """210 normalized pairwise landmark distances; zeros when absent."""
    if hand is None:
        return np.zeros(210)
    return _reference.handshape(hand.points)


def palm_orientation(
    left: HandLandmarks | None, right: HandLandmarks | None
) -> np.ndarray:
    """200 bone-direction cosines, left hand then right; zeros when absent."""
    out = np.zeros(200)
    if left is not None:
        out[0:100] = _reference.palm_orientation_single(left.points)
    if right is not None:
        out[100:200] = _reference.palm_orientation_single(right.points)
    return out


def movement(first: FrameRecord, last: FrameRecord) -> np.ndarray:
    """126 per-landmark displacements between two frames, left then right.

    Each endpoint is expressed in its own body frame before subtracting. A
    hand absent at either endpoint contributes zeros.
    """
    out = np.zeros(126)
    frame_first = body_frame(first.pose)
    frame_last = body_frame(last.pose)
    if first.left is not None and last.left is not None:
        out[0:63] = _reference.hand_displacement(
            first.left.points,
            last.left.points,
            frame_first.origin,
            frame_first.scale,
            frame_last.origin,
            frame_last.scale,
        )
    if first.right is not None and last.right is not None:
        out[63:126] = _reference.hand_displacement(
            first.right.points,
            last.right.points,
            frame_first.origin,
            frame_first.scale,
            frame_last.origin,
            frame_last.scale,
        )
    return out


def _encode_into(out: np.ndarray, first: FrameRecord, last: FrameRecord) -> None:
    _IMPL.encode(
        out,
        first.left.points if first.left is not None else _ABSENT_HAND,
        first.right.points if first.right is not None else _ABSENT_HAND,
        first.pose.points if first.pose is not None else _ABSENT_POSE,
        last.left.points if last.left is not None else _ABSENT_HAND,
        last.right.points if last.right is not None else _ABSENT_HAND,
        last.pose.points if last.pose is not None else _ABSENT_POSE,
        first.left is not None,
        first.right is not None,
        first.pose is not None,
        last.left is not None,
        last.right is not None,
        last.pose is not None,
    )


def encode_window(window: LandmarkWindow) -> np.ndarray:
    """Encode one window into a float64 feature vector of length 947."""
    out = np.empty(FEATURE_LENGTH)
    _encode_into(out, window.frames[0], window.frames[-1])
    return out


def encode_windows(windows: Sequence[LandmarkWindow]) -> np.ndarray:
    """Encode a batch of windows into a float32 array of shape (n, 947)."""
    feats = np.empty((len(windows), FEATURE_LENGTH))
    for i, window in enumerate(windows):
        _encode_into(feats[i], window.frames[0], window.frames[-1])
    return feats.astype(np.float32)
