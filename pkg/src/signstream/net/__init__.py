"""From-scratch branched MLP: model, Adam, training loop, serialization."""

from .model import (
    BRANCH_INPUTS,
    Model,
    ModelConfig,
    batch_loss,
    gradients,
    init_model,
    loss,
    parameter_shapes,
)
from .optim import AdamState, TrainingConfig, adam_step
from .serialize import FORMAT_VERSION, MODEL_MAGIC, load_model, model_file_size, save_model
from .train import EpochStats, TrainResult, split_by_video, train

__all__ = [
    "BRANCH_INPUTS",
    "FORMAT_VERSION",
    "MODEL_MAGIC",
    "AdamState",
    "EpochStats",
    "Model",
    "ModelConfig",
    "TrainResult",
    "TrainingConfig",
    "adam_step",
    "batch_loss",
    "gradients",
    "init_model",
    "load_model",
    "loss",
    "model_file_size",
    "parameter_shapes",
    "save_model",
    "split_by_video",
    "train",
]
