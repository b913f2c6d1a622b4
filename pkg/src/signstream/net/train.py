"""Mini-batch training loop with a video-stratified validation split."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..features.layout import FEATURE_LENGTH
from .model import Model, ModelConfig, _backward, _run_forward, batch_loss
from .optim import AdamState, TrainingConfig, adam_step

log = logging.getLogger(__name__)

_EVAL_CHUNK = 1024


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_sfsr: float


@dataclass(frozen=True)
class TrainResult:
    model: Model
    history: tuple[EpochStats, ...]
    best_epoch: int


def split_by_video(labels, groups, fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Index split holding out a fraction of videos, stratified by class.

    Whole videos move to validation so windows of one video never straddle
    the split. Classes with a single video stay entirely in training.
    Returns (train indices, validation indices).
    """
    labels = np.asarray(labels)
    first_label: dict = {}
    order = []
    for g, y in zip(groups, labels):
        if g not in first_label:
            first_label[g] = int(y)
            order.append(g)
    by_class = defaultdict(list)
    for g in order:
        by_class[first_label[g]].append(g)

    held = set()
    for c in sorted(by_class):
        vids = by_class[c]
        if len(vids) < 2 or fraction <= 0.0:
            continue
        k = max(1, int(round(fraction * len(vids))))
        k = min(k, len(vids) - 1)
        picked = rng.choice(len(vids), size=k, replace=False)
        held.update(vids[i] for i in picked)

    val_mask = np.fromiter((g in held for g in groups), dtype=bool, count=len(labels))
    idx = np.arange(len(labels))
    return idx[~val_mask], idx[val_mask]


def _window_accuracy(model_params, config, features, labels) -> float:
    correct = 0
    for start in range(0, len(labels), _EVAL_CHUNK):
        x = features[start : start + _EVAL_CHUNK]
        probs, _ = _run_forward(model_params, config, x, False, None, need_cache=False)
        correct += int((probs.argmax(axis=1) == labels[start : start + _EVAL_CHUNK]).sum())
    return correct / len(labels)


def train(
    features: np.ndarray,
    labels: np.ndarray,
    mc: ModelConfig,
    tc: TrainingConfig,
    groups=None,
    class_ids=None,
    glosses=None,
) -> TrainResult:
    """Train a classifier on encoded windows.

    features is (n, 947), labels are class indices below mc.class_count,
    and groups (one hashable key per window, defaulting to row index)
    drives the video-level validation split. The returned model carries
    the best-validation parameters; history has one entry per epoch.
    """
    features = np.ascontiguousarray(features, dtype=np.float32)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2 or features.shape[1] != FEATURE_LENGTH:
        raise ValueError(f"features must have shape (n, {FEATURE_LENGTH}), got {features.shape}")
    if features.shape[0] == 0:
        raise ValueError("empty dataset: no windows to train on")
    if labels.shape != (features.shape[0],):
        raise ValueError("labels must align one-to-one with feature rows")
    if labels.min() < 0 or labels.max() >= mc.class_count:
        bad = int(labels[(labels < 0) | (labels >= mc.class_count)][0])
        raise ValueError(f"unseen class id {bad}: labels must lie in [0, {mc.class_count})")
    if groups is None:
        groups = np.arange(features.shape[0])
    if len(groups) != features.shape[0]:
        raise ValueError("groups must align one-to-one with feature rows")

    rng = np.random.default_rng(tc.seed)
    train_idx, val_idx = split_by_video(labels, groups, tc.val_fraction, rng)
    if len(train_idx) == 0:
        raise ValueError("empty dataset: validation split left no training windows")
    log.info(
        "training on %d windows, validating on %d (%d classes)",
        len(train_idx), len(val_idx), mc.class_count,
    )

    model = Model(mc, class_ids=class_ids, glosses=glosses)
    params = model.params
    state = AdamState(params)

    best_sfsr = -1.0
    best_epoch = 0
    best_params = None
    history = []
    for epoch in range(tc.epochs):
        perm = rng.permutation(len(train_idx))
        total = 0.0
        for start in range(0, len(perm), tc.batch_size):
            sel = train_idx[perm[start : start + tc.batch_size]]
            xb = features[sel]
            yb = labels[sel]
            probs, cache = _run_forward(params, mc, xb, True, rng, need_cache=True)
            total += batch_loss(probs, yb) * len(sel)
            grads = _backward(params, mc, cache, yb)
            adam_step(params, grads, state, tc)
        train_loss = total / len(train_idx)

        if len(val_idx) > 0:
            val_sfsr = _window_accuracy(params, mc, features[val_idx], labels[val_idx])
            if val_sfsr > best_sfsr:
                best_sfsr = val_sfsr
                best_epoch = epoch
                best_params = {k: v.copy() for k, v in params.items()}
        else:
            val_sfsr = float("nan")
            best_epoch = epoch
        history.append(EpochStats(epoch=epoch, train_loss=train_loss, val_sfsr=val_sfsr))
        log.info("epoch %d: loss %.4f, val sfsr %s", epoch, train_loss, f"{val_sfsr:.4f}")

    final = Model(
        mc,
        params=best_params if best_params is not None else params,
        class_ids=model.class_ids,
        glosses=model.glosses,
    )
    return TrainResult(model=final, history=tuple(history), best_epoch=best_epoch)
