"""Run configuration parsing."""

import pytest

from signstream.config import (
    AugmentSettings,
    PipelineConfig,
    RunConfig,
    load_config,
    parse_config,
)
from signstream.decoder import DecoderConfig
from signstream.net import TrainingConfig


def test_defaults():
    cfg = RunConfig()
    assert cfg.model == {}
    assert cfg.training == TrainingConfig()
    assert cfg.augment == AugmentSettings()
    assert cfg.pipeline == PipelineConfig()
    assert cfg.decoder == DecoderConfig()
    assert cfg.pipeline.target_fps == 5.0
    assert cfg.pipeline.window == 2
    assert load_config(None) == cfg


def test_parse_full_document():
    cfg = parse_config(
        {
            "model": {"branch_dims": [32, 16], "head_dims": [64], "dropout_rate": 0.1},
            "training": {"epochs": 5, "batch_size": 16},
            "augment": {"copies": 0},
            "pipeline": {"target_fps": 10.0, "window": 3},
            "decoder": {"confidence_threshold": 0.7, "min_run": 2},
        }
    )
    assert cfg.model == {"branch_dims": (32, 16), "head_dims": (64,), "dropout_rate": 0.1}
    assert cfg.training.epochs == 5 and cfg.training.batch_size == 16
    assert cfg.augment.copies == 0
    assert cfg.pipeline.target_fps == 10.0 and cfg.pipeline.window == 3
    assert cfg.decoder.min_run == 2


def test_unknown_keys_are_errors():
    with pytest.raises(ValueError, match="sections"):
        parse_config({"modle": {}})
    with pytest.raises(ValueError, match="model keys"):
        parse_config({"model": {"depth": 3}})
    with pytest.raises(ValueError, match="pipeline keys"):
        parse_config({"pipeline": {"fps": 5}})
    with pytest.raises(ValueError, match="augment keys"):
        parse_config({"augment": {"copy": 1}})
    with pytest.raises(ValueError):
        parse_config([1, 2])


def test_class_count_is_rejected():
    with pytest.raises(ValueError, match="class_count"):
        parse_config({"model": {"class_count": 10}})


def test_section_validation_bubbles_up():
    with pytest.raises(ValueError, match="window"):
        parse_config({"pipeline": {"window": 1}})
    with pytest.raises(ValueError, match="speed_range"):
        parse_config({"augment": {"speed_range": [1.2, 0.9]}})
    with pytest.raises(ValueError, match="min_hand_ratio"):
        PipelineConfig(min_hand_ratio=1.5)
    with pytest.raises(ValueError, match="copies"):
        AugmentSettings(copies=-1)


def test_load_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"training": {"epochs": 2}}', encoding="utf-8")
    assert load_config(path).training.epochs == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValueError, match="valid JSON"):
        load_config(bad)
