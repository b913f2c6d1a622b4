"""signstream: lightweight sign language recognition from pose landmarks.

Landmark records go through resampling and windowing, are encoded as
947-entry ASL parameter vectors, and are classified by a small branched
MLP. A streaming decoder turns per-window predictions into sign tokens
and merges collocations into compound glosses.
"""

__version__ = "0.1.0"

from .landmarks import (
    FrameRecord,
    HandLandmarks,
    PoseLandmarks,
    SignClass,
    SignRegistry,
    VideoSequence,
)

__all__ = [
    "FrameRecord",
    "HandLandmarks",
    "PoseLandmarks",
    "SignClass",
    "SignRegistry",
    "VideoSequence",
    "__version__",
]
