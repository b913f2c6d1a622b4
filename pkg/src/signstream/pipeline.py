"""Glue between datasets and tensors, shared by the CLI, service and tests.

The canonical inference path for one video is: resample to the target
rate, slice into stride-1 windows, carry missing blocks forward inside
each window, encode, classify, decode. The streaming service walks the
same functions incrementally, which is what makes online and offline
decoding agree token for token.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .decoder import CollocationLexicon, DecoderConfig, StreamDecoder
from .features import encode_windows
from .landmarks import SignRegistry, VideoSequence
from .net import Model
from .preprocess import (
    DEFAULT_TARGET_FPS,
    AugmentConfig,
    augment,
    fill_missing,
    make_windows,
    resample,
)

log = logging.getLogger(__name__)

DEFAULT_WINDOW = 2
DEFAULT_STRIDE = 1


def windows_of(
    video: VideoSequence,
    target_fps: float = DEFAULT_TARGET_FPS,
    window: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
):
    """Resampled, filled windows of one video; empty if the video is too
    short at the target rate."""
    seq = resample(video, target_fps)
    return [fill_missing(w) for w in make_windows(seq, window, stride)]


def encode_per_video(
    videos,
    target_fps: float = DEFAULT_TARGET_FPS,
    window: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
    on_short: str = "error",
):
    """Encode each video separately: list of (video_id, sign_id, features).

    on_short picks the reaction to videos yielding no window: "error"
    raises, "skip" drops them with a log line.
    """
    if on_short not in ("error", "skip"):
        raise ValueError(f"on_short must be 'error' or 'skip', got {on_short!r}")
    out = []
    for video in videos:
        wins = windows_of(video, target_fps, window, stride)
        if not wins:
            if on_short == "error":
                raise ValueError(
                    f"video {video.video_id} too short to window at {target_fps} fps"
                )
            log.info("skipping %s: too short to window", video.video_id)
            continue
        out.append((video.video_id, video.sign_id, encode_windows(wins)))
    return out


@dataclass(frozen=True)
class EncodedDataset:
    """Flat training tensors plus the index-to-sign-id mapping."""

    features: np.ndarray  # (n, 947) float32
    labels: np.ndarray  # (n,) int64 class indices
    groups: np.ndarray  # (n,) source video ids
    class_ids: tuple[int, ...]
    glosses: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)


def class_mapping(sign_ids, registry: SignRegistry | None = None):
    """Sorted unique sign ids and their glosses; index = model output."""
    class_ids = tuple(sorted({int(s) for s in sign_ids}))
    if registry is not None:
        glosses = tuple(registry.gloss(c) for c in class_ids)
    else:
        glosses = tuple(f"sign_{c}" for c in class_ids)
    return class_ids, glosses


def _augment_seed(seed: int, video_index: int, copy: int) -> int:
    return int(np.random.SeedSequence([seed, video_index, copy]).generate_state(1)[0])


def prepare_training_data(
    videos,
    registry: SignRegistry | None = None,
    target_fps: float = DEFAULT_TARGET_FPS,
    window: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
    copies: int = 0,
    jitter_sigma: float = 0.008,
    time_offset_max: int = 2,
    speed_range: tuple[float, float] = (0.9, 1.15),
    mirror: bool = True,
    seed: int = 0,
) -> EncodedDataset:
    """Windows, features and class indices for training.

    Besides the original, each video contributes ``copies`` augmented
    variants; mirroring only applies to signs the registry marks
    symmetric. Augmented windows keep the source video id as their group
    so a validation split can hold out whole videos.
    """
    if copies < 0:
        raise ValueError(f"copies must be >= 0, got {copies}")
    if not videos:
        raise ValueError("empty dataset: no videos to encode")

    blocks = []
    labels = []
    groups = []
    for vi, video in enumerate(videos):
        variants = [video]
        symmetric = True
        if registry is not None and video.sign_id in registry:
            symmetric = registry.get(video.sign_id).symmetric
        for c in range(copies):
            cfg = AugmentConfig(
                jitter_sigma=jitter_sigma,
                time_offset_max=time_offset_max,
                mirror=mirror and symmetric and c % 2 == 1,
                speed_range=speed_range,
                seed=_augment_seed(seed, vi, c),
            )
            variants.append(augment(video, cfg))
        for variant in variants:
            wins = windows_of(variant, target_fps, window, stride)
            if not wins:
                log.info("skipping %s variant: too short to window", video.video_id)
                continue
            blocks.append(encode_windows(wins))
            labels.extend([video.sign_id] * len(wins))
            groups.extend([video.video_id] * len(wins))
    if not blocks:
        raise ValueError("empty dataset: no video produced a full window")

    features = np.concatenate(blocks, axis=0)
    sign_ids = np.asarray(labels, dtype=np.int64)
    class_ids, glosses = class_mapping(sign_ids, registry)
    index_of = {c: k for k, c in enumerate(class_ids)}
    indices = np.fromiter((index_of[int(s)] for s in sign_ids), dtype=np.int64, count=len(sign_ids))
    return EncodedDataset(
        features=features,
        labels=indices,
        groups=np.asarray(groups, dtype=object),
        class_ids=class_ids,
        glosses=glosses,
    )


def label_indices(sign_ids, class_ids) -> np.ndarray:
    """Map sign ids onto model output indices; unseen ids are an error."""
    index_of = {int(c): k for k, c in enumerate(class_ids)}
    out = np.empty(len(sign_ids), dtype=np.int64)
    for i, s in enumerate(sign_ids):
        try:
            out[i] = index_of[int(s)]
        except KeyError:
            raise ValueError(f"sign id {int(s)} was not in the model's training classes") from None
    return out


def decode_video(
    model: Model,
    video: VideoSequence,
    cfg: DecoderConfig | None = None,
    lexicon: CollocationLexicon | None = None,
    target_fps: float = DEFAULT_TARGET_FPS,
    window: int = DEFAULT_WINDOW,
) -> list[int]:
    """Offline decode of one video into merged sign ids."""
    wins = windows_of(video, target_fps, window, stride=1)
    decoder = StreamDecoder(cfg, lexicon, class_ids=model.class_ids)
    if wins:
        probs = model.forward(encode_windows(wins))
        for row in probs:
            decoder.push(row)
    return decoder.flush()
