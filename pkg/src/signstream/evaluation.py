"""Recognition metrics and the latency benchmark.

SFSR scores single windows by argmax; ISR scores whole videos by
averaging the softmax vectors over a video's windows before the argmax
(majority vote available behind a flag). Argmax ties break toward the
lowest class index.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .features import encode_window
from .net import Model
from .pipeline import windows_of
from .synthetic import gen_synthetic, make_templates, sample_video

_CHUNK = 1024


@dataclass(frozen=True)
class LatencyStats:
    """Per-window encode+forward wall-clock, milliseconds."""

    median_ms: float
    p95_ms: float
    p99_ms: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "median_ms": self.median_ms,
            "p95_ms": self.p95_ms,
            "p99_ms": self.p99_ms,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class EvalReport:
    """Metric bundle for one evaluation run.

    per_class and the confusion matrix are video-level (ISR) counts;
    confusion rows are true classes, columns predictions, and each row
    sums to that class's video count.
    """

    sfsr: float
    isr: float
    per_class: dict[int, float]
    confusion: np.ndarray
    class_ids: tuple[int, ...]
    video_count: int
    window_count: int
    latency: LatencyStats | None = None

    def to_dict(self) -> dict:
        return {
            "sfsr": self.sfsr,
            "isr": self.isr,
            "per_class": {str(c): v for c, v in self.per_class.items()},
            "confusion": self.confusion.tolist(),
            "class_ids": list(self.class_ids),
            "video_count": self.video_count,
            "window_count": self.window_count,
            "latency": self.latency.to_dict() if self.latency else None,
        }


def _batched_probs(model: Model, features: np.ndarray) -> np.ndarray:
    parts = [
        model.forward(features[i : i + _CHUNK]) for i in range(0, len(features), _CHUNK)
    ]
    return np.concatenate(parts, axis=0)


def sfsr(model: Model, features: np.ndarray, labels) -> float:
    """Fraction of windows whose argmax class matches the label index."""
    features = np.asarray(features)
    labels = np.asarray(labels)
    if len(features) == 0:
        raise ValueError("empty evaluation set")
    preds = _batched_probs(model, features).argmax(axis=1)
    return float((preds == labels).mean())


def _video_prediction(probs: np.ndarray, vote: bool, class_count: int) -> int:
    if vote:
        votes = np.bincount(probs.argmax(axis=1), minlength=class_count)
        return int(votes.argmax())
    return int(probs.mean(axis=0).argmax())


def isr(model: Model, video_features, video_labels, vote: bool = False) -> float:
    """Fraction of videos classified correctly after aggregation."""
    if len(video_features) == 0:
        raise ValueError("empty evaluation set")
    if len(video_features) != len(video_labels):
        raise ValueError("features and labels must align per video")
    correct = 0
    for feats, label in zip(video_features, video_labels):
        if len(feats) == 0:
            raise ValueError("a video with no windows cannot be scored")
        probs = _batched_probs(model, feats)
        if _video_prediction(probs, vote, model.config.class_count) == label:
            correct += 1
    return correct / len(video_features)


def evaluate(model: Model, per_video, vote: bool = False) -> EvalReport:
    """Full report over (video_id, label_index, features) triples."""
    if len(per_video) == 0:
        raise ValueError("empty evaluation set")
    C = model.config.class_count
    confusion = np.zeros((C, C), dtype=np.int64)
    window_hits = 0
    window_total = 0
    for _, label, feats in per_video:
        if len(feats) == 0:
            raise ValueError("a video with no windows cannot be scored")
        if not 0 <= label < C:
            raise ValueError(f"label index {label} out of range for {C} classes")
        probs = _batched_probs(model, feats)
        window_hits += int((probs.argmax(axis=1) == label).sum())
        window_total += len(feats)
        confusion[label, _video_prediction(probs, vote, C)] += 1

    row_totals = confusion.sum(axis=1)
    per_class = {}
    for k, cid in enumerate(model.class_ids):
        if row_totals[k] > 0:
            per_class[cid] = float(confusion[k, k] / row_totals[k])
    return EvalReport(
        sfsr=window_hits / window_total,
        isr=float(confusion.trace() / confusion.sum()),
        per_class=per_class,
        confusion=confusion,
        class_ids=model.class_ids,
        video_count=int(confusion.sum()),
        window_count=window_total,
    )


def latency_bench(model: Model, iterations: int = 1000, seed: int = 0) -> LatencyStats:
    """Median/p95/p99 of single-window encode+forward on one thread.

    Windows come from synthetic videos rendered at the 5 fps target rate;
    a warmup pass is excluded from the stats.
    """
    if iterations < 100:
        raise ValueError(f"iterations must be >= 100, got {iterations}")
    rng = np.random.default_rng(seed)
    wins = []
    for template in make_templates(8, seed=seed):
        video = sample_video(template, f"bench{template.sign_id}", 5.0, rng, dropout=0.0)
        wins.extend(windows_of(video, target_fps=5.0))
    if not wins:
        raise RuntimeError("benchmark window generation produced nothing")

    for i in range(50):  # warmup
        model.forward(encode_window(wins[i % len(wins)]))
    times = np.empty(iterations)
    for i in range(iterations):
        win = wins[i % len(wins)]
        t0 = time.perf_counter()
        model.forward(encode_window(win))
        times[i] = time.perf_counter() - t0
    times *= 1000.0
    return LatencyStats(
        median_ms=float(np.percentile(times, 50)),
        p95_ms=float(np.percentile(times, 95)),
        p99_ms=float(np.percentile(times, 99)),
        iterations=iterations,
    )


__all__ = [
    "EvalReport",
    "LatencyStats",
    "evaluate",
    "gen_synthetic",
    "isr",
    "latency_bench",
    "sfsr",
]
