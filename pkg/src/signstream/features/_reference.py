"""Numpy implementation of the feature kernels.

This is the fallback encoder selected when the compiled extension is not
available and the ground truth the extension is tested against. Both
operate on raw (n, 3) float64 arrays plus presence flags; absent blocks
contribute zeros to their segments.
"""

from __future__ import annotations

import numpy as np

from .layout import (
    DEGENERATE_NORM,
    DEGENERATE_SCALE,
    FEATURE_LENGTH,
    HAND_BONES,
    INDEX_MCP,
    LEFT_SHOULDER,
    MIDDLE_MCP,
    PINKY_MCP,
    RIGHT_SHOULDER,
    WRIST,
)

_PAIR_I, _PAIR_J = np.triu_indices(21, k=1)
_BONE_PARENT = np.array([p for p, _ in HAND_BONES])
_BONE_CHILD = np.array([c for _, c in HAND_BONES])


def body_frame_of(pose: np.ndarray) -> tuple[np.ndarray, float, bool]:
    """Shoulder-midpoint origin and shoulder-distance scale of a pose.

    Returns (origin, scale, degenerate); coincident shoulders fall back to
    scale 1 with the degenerate flag set.
    """
    a = pose[LEFT_SHOULDER]
    b = pose[RIGHT_SHOULDER]
    origin = 0.5 * (a + b)
    d = a - b
    scale = float(np.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]))
    if scale < DEGENERATE_SCALE:
        return origin, 1.0, True
    return origin, scale, False


def location(points: np.ndarray, origin: np.ndarray, scale: float) -> np.ndarray:
    """Body-frame coordinates (p - origin) / scale, flattened row-major."""
    return ((points - origin) / scale).ravel()


def handshape(points: np.ndarray) -> np.ndarray:
    """All 210 pairwise distances (i < j, lexicographic) over the hand's own
    wrist-to-middle-MCP reference length. A degenerate reference yields zeros."""
    ref_d = points[WRIST] - points[MIDDLE_MCP]
    ref = float(np.sqrt(ref_d[0] * ref_d[0] + ref_d[1] * ref_d[1] + ref_d[2] * ref_d[2]))
    if ref < DEGENERATE_SCALE:
        return np.zeros(210)
    d = points[_PAIR_I] - points[_PAIR_J]
    return np.sqrt((d * d).sum(axis=1)) / ref


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]))
    if norm < DEGENERATE_NORM:
        return np.zeros(3)
    return v / norm


def palm_orientation_single(points: np.ndarray) -> np.ndarray:
    """100 cosines for one hand: each bone direction against the palm frame
    (normal, lateral, distal) and the world y and z axes.

    Zero-length bones and a degenerate palm frame zero out the affected
    entries.
    """
    lateral = _unit(points[INDEX_MCP] - points[PINKY_MCP])
    normal = _unit(np.cross(points[INDEX_MCP] - points[WRIST], points[PINKY_MCP] - points[WRIST]))
    distal = np.cross(normal, lateral)

    def dot(u, w):
        # spelled out to fix the summation order (matches the compiled kernel)
        return u[0] * w[0] + u[1] * w[1] + u[2] * w[2]

    out = np.zeros(100)
    bones = points[_BONE_CHILD] - points[_BONE_PARENT]
    for b in range(20):
        v = _unit(bones[b])
        out[5 * b + 0] = dot(v, normal)
        out[5 * b + 1] = dot(v, lateral)
        out[5 * b + 2] = dot(v, distal)
        out[5 * b + 3] = v[1]
        out[5 * b + 4] = v[2]
    np.clip(out, -1.0, 1.0, out=out)
    return out


def hand_displacement(
    first: np.ndarray,
    last: np.ndarray,
    origin_first: np.ndarray,
    scale_first: float,
    origin_last: np.ndarray,
    scale_last: float,
) -> np.ndarray:
    """Displacement of each landmark between the endpoint frames, each endpoint
    expressed in its own body frame."""
    a = (first - origin_first) / scale_first
    b = (last - origin_last) / scale_last
    return (b - a).ravel()


_IDENTITY_ORIGIN = np.zeros(3)


def encode(
    out: np.ndarray,
    first_left: np.ndarray,
    first_right: np.ndarray,
    first_pose: np.ndarray,
    last_left: np.ndarray,
    last_right: np.ndarray,
    last_pose: np.ndarray,
    has_first_left: bool,
    has_first_right: bool,
    has_first_pose: bool,
    has_last_left: bool,
    has_last_right: bool,
    has_last_pose: bool,
) -> np.ndarray:
    """Fill a 947-entry output vector from the endpoint frames of a window."""
    if out.shape != (FEATURE_LENGTH,):
        raise ValueError(f"output must have shape ({FEATURE_LENGTH},)")
    out[:] = 0.0

    if has_last_pose:
        origin_last, scale_last, _ = body_frame_of(last_pose)
    else:
        origin_last, scale_last = _IDENTITY_ORIGIN, 1.0
    if has_first_pose:
        origin_first, scale_first, _ = body_frame_of(first_pose)
    else:
        origin_first, scale_first = _IDENTITY_ORIGIN, 1.0

    if has_last_left:
        out[0:63] = location(last_left, origin_last, scale_last)
        out[201:411] = handshape(last_left)
        out[621:721] = palm_orientation_single(last_left)
    if has_last_right:
        out[63:126] = location(last_right, origin_last, scale_last)
        out[411:621] = handshape(last_right)
        out[721:821] = palm_orientation_single(last_right)
    if has_last_pose:
        out[126:201] = location(last_pose, origin_last, scale_last)

    if has_first_left and has_last_left:
        out[821:884] = hand_displacement(
            first_left, last_left, origin_first, scale_first, origin_last, scale_last
        )
    if has_first_right and has_last_right:
        out[884:947] = hand_displacement(
            first_right, last_right, origin_first, scale_first, origin_last, scale_last
        )
    return out
