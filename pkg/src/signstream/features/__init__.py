"""Feature extraction: ASL parameters encoded as a fixed 947-entry vector."""

from .encoder import (
    BodyFrame,
    active_backend,
    body_frame,
    encode_window,
    encode_windows,
    handshape,
    location_hand,
    location_pose,
    movement,
    palm_orientation,
)
from .layout import (
    FEATURE_LENGTH,
    SEGMENT_NAMES,
    SEGMENT_OFFSETS,
    SEGMENT_SIZES,
    SEGMENTS,
)

__all__ = [
    "FEATURE_LENGTH",
    "SEGMENTS",
    "SEGMENT_NAMES",
    "SEGMENT_OFFSETS",
    "SEGMENT_SIZES",
    "BodyFrame",
    "active_backend",
    "body_frame",
    "encode_window",
    "encode_windows",
    "handshape",
    "location_hand",
    "location_pose",
    "movement",
    "palm_orientation",
]
