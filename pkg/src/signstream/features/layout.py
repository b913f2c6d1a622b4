"""Fixed layout of the 947-dimensional feature vector.

Seven segments, concatenated in this order:

    loc_l        [  0,  63)   left-hand landmarks in the body frame
    loc_r        [ 63, 126)   right-hand landmarks in the body frame
    loc_pose     [126, 201)   pose landmarks in the body frame
    handshape_l  [201, 411)   normalized pairwise distances, left hand
    handshape_r  [411, 621)   normalized pairwise distances, right hand
    palm_orient  [621, 821)   bone-direction cosines, both hands
    movement     [821, 947)   endpoint displacement of both hands
"""

from __future__ import annotations

FEATURE_LENGTH = 947

SEGMENT_SIZES: dict[str, int] = {
    "loc_l": 63,
    "loc_r": 63,
    "loc_pose": 75,
    "handshape_l": 210,
    "handshape_r": 210,
    "palm_orient": 200,
    "movement": 126,
}

SEGMENT_NAMES: tuple[str, ...] = tuple(SEGMENT_SIZES)


def _build_slices() -> dict[str, slice]:
    out = {}
    offset = 0
    for name, size in SEGMENT_SIZES.items():
        out[name] = slice(offset, offset + size)
        offset += size
    assert offset == FEATURE_LENGTH
    return out

SEGMENTS: dict[str, slice] = _build_slices()

SEGMENT_OFFSETS: tuple[int, ...] = tuple(s.start for s in SEGMENTS.values()) + (FEATURE_LENGTH,)

# Shoulder landmarks within the 25-point upper-body pose block.
LEFT_SHOULDER = 11
RIGHT_SHOULDER = 12

# The 20 kinematic bone segments of a hand as (parent, child) landmark index
# pairs: for each finger in thumb..pinky order, the chain from the wrist out
# to the tip.
HAND_BONES: tuple[tuple[int, int], ...] = (
    (0, 1), (1, 2), (2, 3), (3, 4),          # thumb
    (0, 5), (5, 6), (6, 7), (7, 8),          # index
    (0, 9), (9, 10), (10, 11), (11, 12),     # middle
    (0, 13), (13, 14), (14, 15), (15, 16),   # ring
    (0, 17), (17, 18), (18, 19), (19, 20),   # pinky
)

# Palm-frame anchors: wrist, index MCP, pinky MCP.
WRIST = 0
INDEX_MCP = 5
PINKY_MCP = 17

# Hand-scale reference for handshape normalization: wrist to middle MCP.
MIDDLE_MCP = 9

# Below this, a shoulder span or hand reference length counts as degenerate.
DEGENERATE_SCALE = 1e-6
# Below this, a direction vector cannot be normalized.
DEGENERATE_NORM = 1e-12
