"""Branched MLP classifier over the 947-entry feature vector.

Each feature segment feeds its own dense+ReLU stack; the branch outputs
concatenate into a fused head with dropout, ending in a softmax over sign
classes. Forward and backward passes are plain numpy; parameters live in
a flat name-to-array dict whose order is fixed by parameter_shapes().
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features.layout import FEATURE_LENGTH, SEGMENT_OFFSETS, SEGMENT_SIZES

# Branch input widths, one per feature segment, in segment order.
BRANCH_INPUTS = tuple(SEGMENT_SIZES.values())

# Floor applied to predicted probabilities inside the loss.
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class ModelConfig:
    """Architecture of the branched classifier."""

    class_count: int
    branch_dims: tuple[int, ...] = (128, 64)
    head_dims: tuple[int, ...] = (512,)
    dropout_rate: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.class_count, int) or self.class_count < 2:
            raise ValueError(f"class_count must be an integer >= 2, got {self.class_count!r}")
        object.__setattr__(self, "branch_dims", tuple(int(d) for d in self.branch_dims))
        object.__setattr__(self, "head_dims", tuple(int(d) for d in self.head_dims))
        if not self.branch_dims:
            raise ValueError("branch_dims must name at least one hidden layer")
        for d in self.branch_dims + self.head_dims:
            if d < 1:
                raise ValueError(f"layer widths must be positive, got {d}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")

    def to_dict(self) -> dict:
        return {
            "class_count": self.class_count,
            "branch_dims": list(self.branch_dims),
            "head_dims": list(self.head_dims),
            "dropout_rate": self.dropout_rate,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {"class_count", "branch_dims", "head_dims", "dropout_rate", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown ModelConfig keys: {sorted(unknown)}")
        if "class_count" not in data:
            raise ValueError("ModelConfig requires class_count")
        kwargs = dict(data)
        kwargs["class_count"] = int(kwargs["class_count"])
        for key in ("branch_dims", "head_dims"):
            if key in kwargs:
                kwargs[key] = tuple(int(d) for d in kwargs[key])
        return cls(**kwargs)


def parameter_shapes(config: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Parameter names and shapes in canonical (serialization) order."""
    shapes: list[tuple[str, tuple[int, ...]]] = []
    for i, in_dim in enumerate(BRANCH_INPUTS):
        d = in_dim
        for j, width in enumerate(config.branch_dims):
            shapes.append((f"branch{i}.w{j}", (d, width)))
            shapes.append((f"branch{i}.b{j}", (width,)))
            d = width
    d = len(BRANCH_INPUTS) * config.branch_dims[-1]
    for j, width in enumerate(config.head_dims):
        shapes.append((f"head.w{j}", (d, width)))
        shapes.append((f"head.b{j}", (width,)))
        d = width
    shapes.append(("out.w", (d, config.class_count)))
    shapes.append(("out.b", (config.class_count,)))
    return shapes


def _init_params(config: ModelConfig, dtype: np.dtype) -> dict[str, np.ndarray]:
    # He-uniform weights (limit sqrt(6 / fan_in)), zero biases.
    rng = np.random.default_rng(config.seed)
    params = {}
    for name, shape in parameter_shapes(config):
        if len(shape) == 2:
            limit = np.sqrt(6.0 / shape[0])
            params[name] = rng.uniform(-limit, limit, shape).astype(dtype)
        else:
            params[name] = np.zeros(shape, dtype=dtype)
    return params


class Model:
    """A parameterized classifier: config, weights, and the class id map.

    ``class_ids[k]`` is the sign id predicted by output index k; ``glosses``
    is index-aligned. Both default to the identity mapping with placeholder
    gloss names and are normally filled in by training.
    """

    def __init__(
        self,
        config: ModelConfig,
        params: dict[str, np.ndarray] | None = None,
        class_ids: tuple[int, ...] | None = None,
        glosses: tuple[str, ...] | None = None,
        dtype=np.float32,
    ):
        self.config = config
        self.dtype = np.dtype(dtype)
        if params is None:
            params = _init_params(config, self.dtype)
        else:
            expected = dict(parameter_shapes(config))
            if set(params) != set(expected):
                raise ValueError("parameter names do not match the config")
            for name, arr in params.items():
                if tuple(arr.shape) != expected[name]:
                    raise ValueError(
                        f"parameter {name} has shape {arr.shape}, expected {expected[name]}"
                    )
                if not np.all(np.isfinite(arr)):
                    raise ValueError(f"parameter {name} contains non-finite values")
        self.params = params
        if class_ids is None:
            class_ids = tuple(range(config.class_count))
        class_ids = tuple(int(c) for c in class_ids)
        if len(class_ids) != config.class_count:
            raise ValueError("class_ids length must equal class_count")
        self.class_ids = class_ids
        if glosses is None:
            glosses = tuple(f"sign_{c}" for c in class_ids)
        glosses = tuple(str(g) for g in glosses)
        if len(glosses) != config.class_count:
            raise ValueError("glosses length must equal class_count")
        self.glosses = glosses

    @property
    def param_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def forward(self, x: np.ndarray, train_mode: bool = False, rng=None) -> np.ndarray:
        """Class probabilities for one feature vector or a batch.

        Accepts shape (947,) or (n, 947); returns float64 probabilities of
        matching rank. Dropout applies only in train_mode and needs rng.
        """
        x = np.asarray(x, dtype=self.dtype)
        single = x.ndim == 1
        if single:
            x = x[np.newaxis, :]
        if x.ndim != 2 or x.shape[1] != FEATURE_LENGTH:
            raise ValueError(f"input must have {FEATURE_LENGTH} features, got shape {x.shape}")
        probs, _ = _run_forward(self.params, self.config, x, train_mode, rng, need_cache=False)
        return probs[0] if single else probs


def init_model(config: ModelConfig, dtype=np.float32) -> Model:
    """Fresh model with He-uniform weights, deterministic under config.seed."""
    return Model(config, dtype=dtype)


def _run_forward(params, config, x, train_mode, rng, need_cache):
    """Shared forward pass. Returns (float64 probabilities, cache or None)."""
    if train_mode and config.dropout_rate > 0.0 and rng is None:
        raise ValueError("train_mode forward with dropout requires an rng")
    dtype = x.dtype
    branch_caches = []
    branch_out = []
    for i in range(len(BRANCH_INPUTS)):
        h = x[:, SEGMENT_OFFSETS[i] : SEGMENT_OFFSETS[i + 1]]
        layers = []
        for j in range(len(config.branch_dims)):
            z = h @ params[f"branch{i}.w{j}"] + params[f"branch{i}.b{j}"]
            mask = z > 0
            if need_cache:
                layers.append((h, mask))
            h = np.maximum(z, 0)
        branch_out.append(h)
        if need_cache:
            branch_caches.append(layers)
    h = np.concatenate(branch_out, axis=1)
    head_caches = []
    for j in range(len(config.head_dims)):
        z = h @ params[f"head.w{j}"] + params[f"head.b{j}"]
        mask = z > 0
        h_in = h
        h = np.maximum(z, 0)
        drop = None
        if train_mode and config.dropout_rate > 0.0:
            keep = 1.0 - config.dropout_rate
            drop = (rng.random(h.shape) < keep).astype(dtype) / dtype.type(keep)
            h = h * drop
        if need_cache:
            head_caches.append((h_in, mask, drop))
    logits = h @ params["out.w"] + params["out.b"]
    # Softmax in double precision regardless of the runtime dtype.
    logits = logits.astype(np.float64)
    logits -= logits.max(axis=1, keepdims=True)
    e = np.exp(logits)
    probs = e / e.sum(axis=1, keepdims=True)
    cache = None
    if need_cache:
        cache = {
            "branches": branch_caches,
            "head": head_caches,
            "last_hidden": h,
            "probs": probs,
        }
    return probs, cache


def _backward(params, config, cache, targets):
    """Mean-over-batch gradients from a cached forward pass."""
    probs = cache["probs"]
    n = probs.shape[0]
    dtype = cache["last_hidden"].dtype
    d = probs.copy()
    d[np.arange(n), targets] -= 1.0
    d /= n
    d = d.astype(dtype)

    grads = {}
    grads["out.w"] = cache["last_hidden"].T @ d
    grads["out.b"] = d.sum(axis=0)
    dh = d @ params["out.w"].T
    for j in reversed(range(len(config.head_dims))):
        h_in, mask, drop = cache["head"][j]
        if drop is not None:
            dh = dh * drop
        dz = dh * mask
        grads[f"head.w{j}"] = h_in.T @ dz
        grads[f"head.b{j}"] = dz.sum(axis=0)
        dh = dz @ params[f"head.w{j}"].T

    width = config.branch_dims[-1]
    for i in range(len(BRANCH_INPUTS)):
        db = dh[:, i * width : (i + 1) * width]
        for j in reversed(range(len(config.branch_dims))):
            h_in, mask = cache["branches"][i][j]
            dz = db * mask
            grads[f"branch{i}.w{j}"] = h_in.T @ dz
            grads[f"branch{i}.b{j}"] = dz.sum(axis=0)
            db = dz @ params[f"branch{i}.w{j}"].T
    return grads


def loss(probs: np.ndarray, target: int) -> float:
    """Crossentropy of one predicted distribution against a class id."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1:
        raise ValueError("loss expects a single probability vector")
    if not 0 <= target < probs.shape[0]:
        raise ValueError(f"target {target} out of range for {probs.shape[0]} classes")
    return float(-np.log(max(float(probs[target]), PROB_FLOOR)))


def batch_loss(probs: np.ndarray, targets: np.ndarray) -> float:
    """Mean crossentropy over a batch of predicted distributions."""
    probs = np.asarray(probs, dtype=np.float64)
    targets = np.asarray(targets)
    picked = probs[np.arange(probs.shape[0]), targets]
    return float(-np.log(np.maximum(picked, PROB_FLOOR)).mean())


def gradients(model: Model, x: np.ndarray, targets: np.ndarray, rng=None):
    """Mean-over-batch parameter gradients of the crossentropy loss.

    Dropout masks are drawn from rng when given; with rng=None dropout is
    off and the gradient is deterministic. Returns (grads, mean loss).
    """
    x = np.asarray(x, dtype=model.dtype)
    if x.ndim != 2 or x.shape[1] != FEATURE_LENGTH:
        raise ValueError(f"batch must have shape (n, {FEATURE_LENGTH}), got {x.shape}")
    if x.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    targets = np.asarray(targets, dtype=np.int64)
    if targets.min() < 0 or targets.max() >= model.config.class_count:
        raise ValueError("target class id out of range")
    train_mode = rng is not None
    probs, cache = _run_forward(
        model.params, model.config, x, train_mode=train_mode, rng=rng, need_cache=True
    )
    grads = _backward(model.params, model.config, cache, targets)
    return grads, batch_loss(probs, targets)
