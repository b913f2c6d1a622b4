"""Shared fixtures: one small synthetic dataset and a model trained on it.

Both are session-scoped; the model is intentionally tiny so the whole
suite stays fast. Tests that need specific shapes build their own data.
"""

import pytest

from signstream.net import ModelConfig, TrainingConfig, train
from signstream.pipeline import prepare_training_data
from signstream.synthetic import gen_synthetic

TINY_MC = dict(branch_dims=(16, 8), head_dims=(32,), dropout_rate=0.1, seed=7)
TINY_TC = dict(learning_rate=1e-3, epochs=8, batch_size=32, seed=1)


@pytest.fixture(scope="session")
def synth_dataset():
    """(videos, registry): 4 classes x 6 videos at 24 fps."""
    return gen_synthetic(4, 6, fps=24.0, seed=3)


@pytest.fixture(scope="session")
def tiny_model(synth_dataset):
    """A small but usefully accurate model trained on synth_dataset."""
    videos, registry = synth_dataset
    ds = prepare_training_data(videos, registry, copies=0, seed=1)
    mc = ModelConfig(class_count=len(ds.class_ids), **TINY_MC)
    result = train(
        ds.features, ds.labels, mc, TrainingConfig(**TINY_TC),
        groups=ds.groups, class_ids=ds.class_ids, glosses=ds.glosses,
    )
    return result.model
