"""Dataset-to-tensor glue: windowing, encoding, label maps, offline decode."""

import numpy as np
import pytest

from signstream.features import FEATURE_LENGTH
from signstream.landmarks import SignClass, SignRegistry, VideoSequence
from signstream.pipeline import (
    class_mapping,
    decode_video,
    encode_per_video,
    label_indices,
    prepare_training_data,
    windows_of,
)
from signstream.synthetic import gen_synthetic

from helpers import rand_video


def test_windows_of_counts():
    rng = np.random.default_rng(0)
    video = rand_video(rng, n=24, video_id="w")  # 24 frames at 24 fps
    wins = windows_of(video, target_fps=5.0, window=2, stride=1)
    # floor(23 / 24 * 5) + 1 = 5 resampled frames -> 4 stride-1 pairs
    assert len(wins) == 4
    assert all(len(w.frames) == 2 for w in wins)
    assert windows_of(rand_video(rng, n=3, video_id="short"), target_fps=5.0) == []


def test_encode_per_video_shapes():
    rng = np.random.default_rng(1)
    videos = [rand_video(rng, n=24, video_id=f"v{i}") for i in range(3)]
    out = encode_per_video(videos)
    assert [vid for vid, _, _ in out] == ["v0", "v1", "v2"]
    for _, sign_id, feats in out:
        assert isinstance(sign_id, int)
        assert feats.shape == (4, FEATURE_LENGTH)


def test_encode_per_video_short_handling():
    rng = np.random.default_rng(2)
    videos = [rand_video(rng, n=24, video_id="ok"), rand_video(rng, n=2, video_id="tiny")]
    with pytest.raises(ValueError, match="tiny"):
        encode_per_video(videos)
    out = encode_per_video(videos, on_short="skip")
    assert [vid for vid, _, _ in out] == ["ok"]
    with pytest.raises(ValueError):
        encode_per_video(videos, on_short="drop")


def test_class_mapping_sorted_with_glosses():
    reg = SignRegistry([SignClass(sign_id=5, gloss="CAR"), SignClass(sign_id=2, gloss="GO")])
    class_ids, glosses = class_mapping([5, 2, 5, 9], reg)
    assert class_ids == (2, 5, 9)
    assert glosses == ("GO", "CAR", "sign_9")
    _, fallback = class_mapping([3])
    assert fallback == ("sign_3",)


def test_label_indices_and_unseen_error():
    idx = label_indices([9, 2, 2], class_ids=(2, 5, 9))
    assert idx.tolist() == [2, 0, 0]
    with pytest.raises(ValueError, match="sign id 7"):
        label_indices([7], class_ids=(2, 5))


def test_prepare_training_data_baseline(synth_dataset):
    videos, registry = synth_dataset
    ds = prepare_training_data(videos, registry, copies=0)
    assert ds.features.shape == (len(ds), FEATURE_LENGTH)
    assert ds.features.dtype == np.float32
    assert len(ds.labels) == len(ds.groups) == len(ds)
    assert ds.class_ids == tuple(sorted(ds.class_ids))
    assert set(ds.labels.tolist()) <= set(range(len(ds.class_ids)))
    # groups are source video ids, so a split can hold out whole videos
    assert set(ds.groups.tolist()) == {v.video_id for v in videos}
    for k, cid in enumerate(ds.class_ids):
        assert registry.gloss(cid) == ds.glosses[k]


def test_prepare_training_data_copies_add_rows(synth_dataset):
    videos, registry = synth_dataset
    base = prepare_training_data(videos[:4], registry, copies=0)
    more = prepare_training_data(videos[:4], registry, copies=2, seed=0)
    assert len(more) > len(base)
    # augmented windows keep the source video id as their group
    assert set(more.groups.tolist()) == {v.video_id for v in videos[:4]}


def test_prepare_training_data_is_seeded(synth_dataset):
    videos, registry = synth_dataset
    a = prepare_training_data(videos[:3], registry, copies=1, seed=5)
    b = prepare_training_data(videos[:3], registry, copies=1, seed=5)
    c = prepare_training_data(videos[:3], registry, copies=1, seed=6)
    assert np.array_equal(a.features, b.features)
    assert not np.array_equal(a.features, c.features)


def test_prepare_training_data_validation(synth_dataset):
    videos, registry = synth_dataset
    with pytest.raises(ValueError, match="copies"):
        prepare_training_data(videos, registry, copies=-1)
    with pytest.raises(ValueError, match="empty dataset"):
        prepare_training_data([], registry)
    rng = np.random.default_rng(3)
    shorts = [rand_video(rng, n=2, video_id="s")]
    with pytest.raises(ValueError, match="empty dataset"):
        prepare_training_data(shorts, registry)


def test_decode_video_smoke(synth_dataset, tiny_model):
    videos, _ = synth_dataset
    tokens = decode_video(tiny_model, videos[0])
    assert isinstance(tokens, list)
    assert all(isinstance(t, int) for t in tokens)
    assert tokens == decode_video(tiny_model, videos[0])  # deterministic


def test_decode_video_too_short_is_empty(tiny_model):
    rng = np.random.default_rng(4)
    assert decode_video(tiny_model, rand_video(rng, n=2, video_id="t")) == []


def test_gen_synthetic_feeds_the_pipeline():
    videos, registry = gen_synthetic(3, 4, fps=24.0, seed=0)
    ds = prepare_training_data(videos, registry, copies=0)
    assert len(ds.class_ids) == 3
    assert len(ds) > 0
