"""Domain types for landmark frames plus the record CSV format.

One record row stores a single video frame: 21 left-hand landmarks, 21
right-hand landmarks and 25 upper-body pose landmarks (x, y, z each),
followed by video_id, sign_id and fps.  A detector block that produced no
output is stored as empty cells, never as zeros, so that detector dropout
stays distinguishable from a landmark sitting at the origin.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

HAND_POINTS = 21
POSE_POINTS = 25

# sign_id 0 is the no-sign class: frames annotated as random movement
# rather than part of a sign. It never needs a registry entry.
NO_SIGN_ID = 0


def _frozen_points(points, count: int, what: str) -> np.ndarray:
    arr = np.array(points, dtype=np.float64)
    if arr.shape != (count, 3):
        raise ValueError(f"{what} expects {count} (x, y, z) points, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{what} contains non-finite coordinates")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HandLandmarks:
    """21 hand landmarks as (x, y, z) rows, wrist first, estimator index order."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen_points(self.points, HAND_POINTS, "HandLandmarks"))

    def __eq__(self, other):
        return isinstance(other, HandLandmarks) and np.array_equal(self.points, other.points)


@dataclass(frozen=True, eq=False)
class PoseLandmarks:
    """25 upper-body pose landmarks as (x, y, z) rows, indices 0-24."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen_points(self.points, POSE_POINTS, "PoseLandmarks"))

    def __eq__(self, other):
        return isinstance(other, PoseLandmarks) and np.array_equal(self.points, other.points)


@dataclass(frozen=True)
class FrameRecord:
    """One video frame of landmark data plus its annotation metadata.

    Any of the three blocks may be absent (detector dropout). A record with
    all three absent is an empty-detection frame and is still valid: it
    carries timing information for the stream.
    """

    left: HandLandmarks | None
    right: HandLandmarks | None
    pose: PoseLandmarks | None
    video_id: str
    sign_id: int
    fps: float

    def __post_init__(self):
        if not math.isfinite(self.fps) or self.fps <= 0:
            raise ValueError(f"fps must be positive and finite, got {self.fps}")
        if self.sign_id < 0:
            raise ValueError(f"sign_id must be non-negative, got {self.sign_id}")

    @property
    def empty(self) -> bool:
        """True when no detector block is present."""
        return self.left is None and self.right is None and self.pose is None


@dataclass(frozen=True)
class VideoSequence:
    """Ordered frames of one sample video, homogeneous in video_id and fps."""

    video_id: str
    fps: float
    frames: tuple[FrameRecord, ...]
    sign_id: int = NO_SIGN_ID

    def __post_init__(self):
        if not self.frames:
            raise ValueError("VideoSequence requires at least one frame")
        object.__setattr__(self, "frames", tuple(self.frames))
        for f in self.frames:
            if f.video_id != self.video_id:
                raise ValueError(f"frame video_id {f.video_id!r} != sequence video_id {self.video_id!r}")
            if f.fps != self.fps:
                raise ValueError(f"mixed fps within video {self.video_id!r}: {f.fps} != {self.fps}")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class SignClass:
    """One sign in the registry: gloss lemma plus its annotation attributes."""

    sign_id: int
    gloss: str
    english: str = ""
    handedness: str = "one"
    symmetric: bool = False
    handshape_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.sign_id < 0:
            raise ValueError("sign_id must be non-negative")
        if not self.gloss:
            raise ValueError("gloss must be non-empty")
        if self.handedness not in ("one", "two"):
            raise ValueError(f"handedness must be 'one' or 'two', got {self.handedness!r}")
        object.__setattr__(self, "handshape_tags", tuple(self.handshape_tags))


class SignRegistry:
    """Sign classes keyed by sign_id. Id 0 is the implicit no-sign class."""

    def __init__(self, classes: Iterable[SignClass] = ()):
        self._by_id: dict[int, SignClass] = {}
        for c in classes:
            if c.sign_id in self._by_id:
                raise ValueError(f"duplicate sign_id {c.sign_id} in registry")
            self._by_id[c.sign_id] = c

    def __contains__(self, sign_id: int) -> bool:
        return sign_id in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self) -> Iterator[SignClass]:
        return iter(sorted(self._by_id.values(), key=lambda c: c.sign_id))

    def get(self, sign_id: int) -> SignClass | None:
        return self._by_id.get(sign_id)

    def gloss(self, sign_id: int) -> str:
        """Gloss for a sign id, with a stable placeholder for unknown ids."""
        c = self._by_id.get(sign_id)
        return c.gloss if c is not None else f"sign_{sign_id}"

    def sign_ids(self) -> list[int]:
        return sorted(self._by_id)

    @classmethod
    def from_json(cls, path: str | Path) -> "SignRegistry":
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
        if not isinstance(entries, list):
            raise ValueError(f"{path}: sign registry must be a JSON array")
        classes = [
            SignClass(
                sign_id=int(e["sign_id"]),
                gloss=e["gloss"],
                english=e.get("english", ""),
                handedness=e.get("handedness", "one"),
                symmetric=bool(e.get("symmetric", False)),
                handshape_tags=tuple(e.get("handshape_tags", ())),
            )
            for e in entries
        ]
        return cls(classes)

    def to_json(self, path: str | Path) -> None:
        entries = [
            {
                "sign_id": c.sign_id,
                "gloss": c.gloss,
                "english": c.english,
                "handedness": c.handedness,
                "symmetric": c.symmetric,
                "handshape_tags": list(c.handshape_tags),
            }
            for c in self
        ]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(entries, fh, indent=2)
            fh.write("\n")


# --- record CSV -------------------------------------------------------------

def _coordinate_columns() -> list[str]:
    cols = []
    for suffix, count in (("l", HAND_POINTS), ("r", HAND_POINTS), ("p", POSE_POINTS)):
        for i in range(count):
            for axis in ("x", "y", "z"):
                cols.append(f"{axis}{i}_{suffix}")
    return cols

CSV_COLUMNS: tuple[str, ...] = tuple(_coordinate_columns() + ["video_id", "sign_id", "fps"])
CSV_HEADER: str = ",".join(CSV_COLUMNS)

_LEFT = slice(0, 63)
_RIGHT = slice(63, 126)
_POSE = slice(126, 201)


def _parse_block(cells: Sequence[str], count: int, what: str):
    filled = [c for c in cells if c != ""]
    if not filled:
        return None
    if len(filled) != len(cells):
        raise ValueError(f"{what} block is partially filled; expected all {len(cells)} cells or none")
    try:
        values = [float(c) for c in cells]
    except ValueError as exc:
        raise ValueError(f"non-numeric cell in {what} block: {exc}") from None
    return np.array(values, dtype=np.float64).reshape(count, 3)


def parse_record(line: str, header: Sequence[str] | None = None) -> FrameRecord:
    """Parse one CSV data line into a FrameRecord.

    ``header`` may be passed to assert the canonical 204-column layout; rows
    are mapped positionally either way.
    """
    if header is not None and tuple(header) != CSV_COLUMNS:
        raise ValueError("header does not match the canonical record layout")
    fields = next(csv.reader([line]))
    if len(fields) != len(CSV_COLUMNS):
        raise ValueError(f"expected {len(CSV_COLUMNS)} columns, got {len(fields)}")

    left = _parse_block(fields[_LEFT], HAND_POINTS, "left hand")
    right = _parse_block(fields[_RIGHT], HAND_POINTS, "right hand")
    pose = _parse_block(fields[_POSE], POSE_POINTS, "pose")

    video_id = fields[201]
    try:
        sign_id = int(fields[202])
    except ValueError:
        raise ValueError(f"sign_id is not an integer: {fields[202]!r}") from None
    try:
        fps = float(fields[203])
    except ValueError:
        raise ValueError(f"fps is not numeric: {fields[203]!r}") from None

    return FrameRecord(
        left=HandLandmarks(left) if left is not None else None,
        right=HandLandmarks(right) if right is not None else None,
        pose=PoseLandmarks(pose) if pose is not None else None,
        video_id=video_id,
        sign_id=sign_id,
        fps=fps,
    )


def _block_cells(block, size: int) -> list[str]:
    if block is None:
        return [""] * (size * 3)
    return [repr(float(v)) for v in block.points.ravel()]


def serialize_record(rec: FrameRecord) -> str:
    """Serialize a FrameRecord to one CSV line (no terminator).

    Coordinates use shortest round-trip decimal formatting, so
    ``parse_record(serialize_record(r)) == r`` exactly.
    """
    cells = (
        _block_cells(rec.left, HAND_POINTS)
        + _block_cells(rec.right, HAND_POINTS)
        + _block_cells(rec.pose, POSE_POINTS)
        + [rec.video_id, str(rec.sign_id), repr(float(rec.fps))]
    )
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(cells)
    return buf.getvalue().rstrip("\n")


def read_records(path: str | Path) -> Iterator[FrameRecord]:
    """Yield records from one CSV file, validating its header first."""
    with open(path, encoding="utf-8", newline="") as fh:
        header_line = fh.readline().rstrip("\n").rstrip("\r")
        if header_line != CSV_HEADER:
            raise ValueError(f"{path}: header does not match the canonical record layout")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            try:
                yield parse_record(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None


def write_records(path: str | Path, records: Iterable[FrameRecord]) -> int:
    """Write records as a canonical CSV file. Returns the row count."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(serialize_record(rec) + "\n")
            n += 1
    return n


def _video_label(sign_ids: list[int]) -> int:
    """Video-level label: the most frequent non-blank sign id (ties to the lowest)."""
    counts = Counter(s for s in sign_ids if s != NO_SIGN_ID)
    if not counts:
        return NO_SIGN_ID
    best = max(counts.values())
    return min(s for s, n in counts.items() if n == best)


def group_videos(records: Iterable[FrameRecord]) -> list[VideoSequence]:
    """Group records into VideoSequences by video_id, in first-appearance order.

    Contiguity is not required; frames keep file order within each video.
    """
    groups: dict[str, list[FrameRecord]] = {}
    for rec in records:
        groups.setdefault(rec.video_id, []).append(rec)
    videos = []
    for vid, frames in groups.items():
        fps = frames[0].fps
        for f in frames:
            if f.fps != fps:
                raise ValueError(f"mixed fps within video {vid!r}: {f.fps} != {fps}")
        label = _video_label([f.sign_id for f in frames])
        videos.append(VideoSequence(video_id=vid, fps=fps, frames=tuple(frames), sign_id=label))
    return videos


def load_dataset(path: str | Path) -> tuple[list[VideoSequence], SignRegistry]:
    """Load record CSV(s) plus the sign registry from a file or directory.

    A directory is expected to hold one or more ``*.csv`` record files and a
    ``signs.json`` registry; a file path names a single record CSV with
    ``signs.json`` alongside it. Every non-blank sign_id used by a record
    must resolve in the registry.
    """
    path = Path(path)
    if path.is_dir():
        csv_files = sorted(path.glob("*.csv"))
        registry_path = path / "signs.json"
    else:
        csv_files = [path]
        registry_path = path.parent / "signs.json"
    if not csv_files:
        raise ValueError(f"empty dataset: no record CSV files under {path}")
    if not registry_path.exists():
        raise ValueError(f"missing sign registry {registry_path}")

    registry = SignRegistry.from_json(registry_path)

    def _all_records():
        for f in csv_files:
            yield from read_records(f)

    videos = group_videos(_all_records())
    if not videos:
        raise ValueError(f"empty dataset: no records in {path}")
    for v in videos:
        for f in v.frames:
            if f.sign_id != NO_SIGN_ID and f.sign_id not in registry:
                raise ValueError(f"unknown sign_id {f.sign_id} in video {v.video_id!r}")
    return videos, registry
