"""Adam with weight decay, written against the flat parameter dict."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrainingConfig:
    """Optimization hyperparameters. Defaults follow the published setup."""

    learning_rate: float = 1e-4
    weight_decay: float = 1e-5
    epochs: int = 40
    batch_size: int = 64
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    # Decay applied outside the Adam moments by default; False folds it
    # into the gradient as classic L2 regularization.
    decoupled_decay: bool = True
    val_fraction: float = 0.1

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be non-negative, got {self.weight_decay}")
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise ValueError(f"epochs must be an integer >= 1, got {self.epochs!r}")
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise ValueError(f"batch_size must be an integer >= 1, got {self.batch_size!r}")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError(f"val_fraction must be in [0, 1), got {self.val_fraction}")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "weight_decay": self.weight_decay,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "decoupled_decay": self.decoupled_decay,
            "val_fraction": self.val_fraction,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainingConfig":
        known = set(cls.to_dict(cls()))
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown TrainingConfig keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("epochs", "batch_size", "seed"):
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        return cls(**kwargs)


class AdamState:
    """First/second moment accumulators and the step counter."""

    def __init__(self, params: dict[str, np.ndarray]):
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.step = 0


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    tc: TrainingConfig,
) -> None:
    """One bias-corrected Adam update, in place.

    With decoupled_decay the shrink p -= lr * wd * p happens after the
    Adam step and never touches the moments.
    """
    if set(grads) != set(params):
        raise ValueError("gradient names do not match parameters")
    state.step += 1
    t = state.step
    correct1 = 1.0 - tc.beta1**t
    correct2 = 1.0 - tc.beta2**t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient {name} has shape {g.shape}, expected {p.shape}")
        if not tc.decoupled_decay and tc.weight_decay > 0:
            g = g + tc.weight_decay * p
        m = state.m[name]
        v = state.v[name]
        m *= tc.beta1
        m += (1.0 - tc.beta1) * g
        v *= tc.beta2
        v += (1.0 - tc.beta2) * (g * g)
        m_hat = m / correct1
        v_hat = v / correct2
        p -= (tc.learning_rate * m_hat / (np.sqrt(v_hat) + tc.eps)).astype(p.dtype)
        if tc.decoupled_decay and tc.weight_decay > 0:
            p -= (tc.learning_rate * tc.weight_decay) * p
