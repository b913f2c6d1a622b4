"""Run configuration: one JSON document, every field optional.

Sections: "model" (architecture overrides), "training", "augment",
"pipeline", "decoder". Unknown sections or keys are errors so that typos
never silently fall back to defaults. class_count never appears here; it
is always derived from the data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .decoder import DecoderConfig
from .net import TrainingConfig
from .pipeline import DEFAULT_STRIDE, DEFAULT_WINDOW
from .preprocess import DEFAULT_TARGET_FPS

_MODEL_KEYS = {"branch_dims", "head_dims", "dropout_rate", "seed"}


@dataclass(frozen=True)
class PipelineConfig:
    """Resampling and windowing knobs shared by train, eval and serve."""

    target_fps: float = DEFAULT_TARGET_FPS
    window: int = DEFAULT_WINDOW
    stride: int = DEFAULT_STRIDE
    min_hand_ratio: float = 0.0

    def __post_init__(self):
        if self.target_fps <= 0:
            raise ValueError(f"target_fps must be positive, got {self.target_fps}")
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if not 0.0 <= self.min_hand_ratio <= 1.0:
            raise ValueError(f"min_hand_ratio must be in [0, 1], got {self.min_hand_ratio}")

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {"target_fps", "window", "stride", "min_hand_ratio"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown pipeline keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("window", "stride"):
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class AugmentSettings:
    """How many augmented copies each training video contributes, and with
    what distortion ranges. copies=0 disables augmentation."""

    copies: int = 1
    jitter_sigma: float = 0.008
    time_offset_max: int = 2
    mirror: bool = True
    speed_range: tuple[float, float] = (0.9, 1.15)

    def __post_init__(self):
        if self.copies < 0:
            raise ValueError(f"copies must be >= 0, got {self.copies}")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")
        if self.time_offset_max < 0:
            raise ValueError("time_offset_max must be >= 0")
        object.__setattr__(self, "speed_range", tuple(self.speed_range))
        lo, hi = self.speed_range
        if not 0 < lo <= hi:
            raise ValueError(f"speed_range must satisfy 0 < min <= max, got {self.speed_range}")

    @classmethod
    def from_dict(cls, data: dict) -> "AugmentSettings":
        known = {"copies", "jitter_sigma", "time_offset_max", "mirror", "speed_range"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown augment keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("copies", "time_offset_max"):
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class RunConfig:
    model: dict = field(default_factory=dict)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    augment: AugmentSettings = field(default_factory=AugmentSettings)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    known = {"model", "training", "augment", "pipeline", "decoder"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")

    model = dict(data.get("model", {}))
    if "class_count" in model:
        raise ValueError("model.class_count is derived from the data, remove it")
    bad = set(model) - _MODEL_KEYS
    if bad:
        raise ValueError(f"unknown model keys: {sorted(bad)}")
    if "branch_dims" in model:
        model["branch_dims"] = tuple(int(d) for d in model["branch_dims"])
    if "head_dims" in model:
        model["head_dims"] = tuple(int(d) for d in model["head_dims"])

    return RunConfig(
        model=model,
        training=TrainingConfig.from_dict(data.get("training", {})),
        augment=AugmentSettings.from_dict(data.get("augment", {})),
        pipeline=PipelineConfig.from_dict(data.get("pipeline", {})),
        decoder=DecoderConfig.from_dict(data.get("decoder", {})),
    )


def load_config(path=None) -> RunConfig:
    """Parse a config file; None yields all defaults."""
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file is not valid JSON: {path}: {exc}") from exc
    return parse_config(data)
