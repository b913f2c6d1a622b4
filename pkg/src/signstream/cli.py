"""Command-line entry points.

Every subcommand exits 0 on success and nonzero with a message on stderr
otherwise; library ValueErrors surface as clean one-line failures.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import json
import logging
import sys
from pathlib import Path

import click

from .config import load_config
from .decoder import CollocationLexicon
from .evaluation import evaluate, latency_bench
from .features import FEATURE_LENGTH, active_backend
from .landmarks import SignRegistry, load_dataset, write_records
from .net import Model, ModelConfig, load_model, save_model, train
from .pipeline import decode_video, encode_per_video, label_indices, prepare_training_data
from .preprocess import DEFAULT_TARGET_FPS, filter_dataset
from .synthetic import gen_synthetic

_EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
_EXISTING_PATH = click.Path(exists=True, path_type=Path)


def _surface_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, OSError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_lexicon(path: Path | None) -> CollocationLexicon | None:
    return None if path is None else CollocationLexicon.load(path)


def _gloss_of(model: Model, registry: SignRegistry, sign_id: int) -> str:
    """Model mapping first; merged collocation ids fall back to the registry."""
    try:
        return model.glosses[model.class_ids.index(sign_id)]
    except ValueError:
        return registry.gloss(sign_id)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool):
    """Sign recognition from hand and pose landmark streams."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command("train")
@click.option("--data", "data_path", required=True, type=_EXISTING_PATH,
              help="Record CSV file or dataset directory.")
@click.option("--config", "config_path", type=_EXISTING_FILE,
              help="JSON run configuration; omitted fields use defaults.")
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False, path_type=Path),
              help="Where to write the trained model.")
@click.option("--seed", type=int, default=None,
              help="Override the configured training seed.")
@_surface_errors
def train_cmd(data_path: Path, config_path: Path | None, out_path: Path, seed: int | None):
    """Train a classifier on a labeled landmark dataset."""
    cfg = load_config(config_path)
    tc = cfg.training if seed is None else dataclasses.replace(cfg.training, seed=seed)
    videos, registry = load_dataset(data_path)
    if cfg.pipeline.min_hand_ratio > 0.0:
        videos = filter_dataset(videos, cfg.pipeline.min_hand_ratio)
    dataset = prepare_training_data(
        videos,
        registry,
        target_fps=cfg.pipeline.target_fps,
        window=cfg.pipeline.window,
        stride=cfg.pipeline.stride,
        copies=cfg.augment.copies,
        jitter_sigma=cfg.augment.jitter_sigma,
        time_offset_max=cfg.augment.time_offset_max,
        speed_range=cfg.augment.speed_range,
        mirror=cfg.augment.mirror,
        seed=tc.seed,
    )
    mc = ModelConfig.from_dict({"class_count": len(dataset.class_ids), **cfg.model})
    result = train(
        dataset.features,
        dataset.labels,
        mc,
        tc,
        groups=dataset.groups,
        class_ids=dataset.class_ids,
        glosses=dataset.glosses,
    )
    size = save_model(result.model, out_path)
    best = result.history[result.best_epoch]
    click.echo(
        f"trained {mc.class_count} classes on {len(dataset)} windows "
        f"from {len(videos)} videos"
    )
    click.echo(
        f"final train loss {result.history[-1].train_loss:.4f}, "
        f"best val sfsr {best.val_sfsr:.4f} at epoch {best.epoch}"
    )
    click.echo(f"wrote {out_path} ({size} bytes)")


@main.command("eval")
@click.option("--model", "model_path", required=True, type=_EXISTING_FILE)
@click.option("--data", "data_path", required=True, type=_EXISTING_PATH)
@click.option("--metric", type=click.Choice(["sfsr", "isr"]), default="isr",
              show_default=True, help="Headline metric for the plain output.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full report as JSON.")
@click.option("--vote", is_flag=True,
              help="Aggregate videos by window-argmax vote instead of mean softmax.")
@click.option("--config", "config_path", type=_EXISTING_FILE,
              help="Run configuration (pipeline knobs).")
@_surface_errors
def eval_cmd(model_path: Path, data_path: Path, metric: str, as_json: bool,
             vote: bool, config_path: Path | None):
    """Score a model on a labeled dataset."""
    cfg = load_config(config_path)
    model = load_model(model_path)
    videos, _ = load_dataset(data_path)
    triples = encode_per_video(
        videos,
        target_fps=cfg.pipeline.target_fps,
        window=cfg.pipeline.window,
        stride=cfg.pipeline.stride,
    )
    labels = label_indices([sid for _, sid, _ in triples], model.class_ids)
    per_video = [
        (vid, int(label), feats)
        for (vid, _, feats), label in zip(triples, labels)
    ]
    report = evaluate(model, per_video, vote=vote)
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
        return
    value = report.isr if metric == "isr" else report.sfsr
    click.echo(
        f"{metric}: {value:.4f} over {report.video_count} videos "
        f"({report.window_count} windows)"
    )


@main.command("encode")
@click.option("--data", "data_path", required=True, type=_EXISTING_PATH)
@click.option("--out", "out_path", required=True,
              type=click.Path(dir_okay=False, path_type=Path))
@_surface_errors
def encode_cmd(data_path: Path, out_path: Path):
    """Encode a dataset into per-window feature vectors as CSV."""
    videos, _ = load_dataset(data_path)
    triples = encode_per_video(videos, on_short="skip")
    n = 0
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "sign_id"] + [f"f{i:03d}" for i in range(FEATURE_LENGTH)])
        for video_id, sign_id, feats in triples:
            for row in feats:
                writer.writerow([video_id, sign_id] + [repr(float(v)) for v in row])
                n += 1
    click.echo(f"wrote {n} windows x {FEATURE_LENGTH} features to {out_path}")


@main.command("serve")
@click.option("--model", "model_path", required=True, type=_EXISTING_FILE)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--target-fps", type=float, default=None,
              help=f"Resample rate; defaults to the configured pipeline rate "
                   f"({DEFAULT_TARGET_FPS}).")
@click.option("--lexicon", "lexicon_path", type=_EXISTING_FILE,
              help="Collocation lexicon JSON.")
@click.option("--static", "static_dir",
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory served at / (the browser client).")
@click.option("--config", "config_path", type=_EXISTING_FILE,
              help="Run configuration (decoder and pipeline knobs).")
@click.option("--ndjson-port", type=int, default=None,
              help="Also accept newline-delimited JSON on this TCP port.")
@_surface_errors
def serve_cmd(model_path: Path, host: str, port: int, target_fps: float | None,
              lexicon_path: Path | None, static_dir: Path | None,
              config_path: Path | None, ndjson_port: int | None):
    """Serve the model over a WebSocket at /stream."""
    import uvicorn

    from .service import create_app

    cfg = load_config(config_path)
    model = load_model(model_path)
    app = create_app(
        model,
        decoder_config=cfg.decoder,
        lexicon=_load_lexicon(lexicon_path),
        target_fps=target_fps if target_fps is not None else cfg.pipeline.target_fps,
        window=cfg.pipeline.window,
        static_dir=static_dir,
        ndjson_port=ndjson_port,
    )
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command("bench")
@click.option("--model", "model_path", required=True, type=_EXISTING_FILE)
@click.option("--iters", type=click.IntRange(min=100), default=1000, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the stats as JSON.")
@_surface_errors
def bench_cmd(model_path: Path, iters: int, as_json: bool):
    """Measure single-window encode+forward latency."""
    model = load_model(model_path)
    stats = latency_bench(model, iterations=iters)
    if as_json:
        click.echo(json.dumps({**stats.to_dict(), "encoder_backend": active_backend()}))
        return
    click.echo(f"encoder backend: {active_backend()}")
    click.echo(f"iterations: {stats.iterations}")
    click.echo(f"median: {stats.median_ms:.3f} ms")
    click.echo(f"p95: {stats.p95_ms:.3f} ms")
    click.echo(f"p99: {stats.p99_ms:.3f} ms")


@main.command("synth")
@click.option("--classes", type=click.IntRange(min=2), required=True,
              help="Number of sign classes.")
@click.option("--per-class", type=click.IntRange(min=1), required=True,
              help="Videos per class.")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False, path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--fps", type=float, default=24.0, show_default=True)
@_surface_errors
def synth_cmd(classes: int, per_class: int, out_dir: Path, seed: int, fps: float):
    """Generate a synthetic landmark dataset (one CSV per video + signs.json)."""
    videos, registry = gen_synthetic(classes, per_class, fps=fps, seed=seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    for video in videos:
        write_records(out_dir / f"{video.video_id}.csv", video.frames)
    registry.to_json(out_dir / "signs.json")
    click.echo(f"wrote {len(videos)} videos across {classes} classes to {out_dir}")


@main.command("decode")
@click.option("--model", "model_path", required=True, type=_EXISTING_FILE)
@click.option("--data", "data_path", required=True, type=_EXISTING_PATH)
@click.option("--lexicon", "lexicon_path", type=_EXISTING_FILE,
              help="Collocation lexicon JSON.")
@click.option("--json", "as_json", is_flag=True, help="Emit results as JSON.")
@click.option("--config", "config_path", type=_EXISTING_FILE,
              help="Run configuration (decoder and pipeline knobs).")
@_surface_errors
def decode_cmd(model_path: Path, data_path: Path, lexicon_path: Path | None,
               as_json: bool, config_path: Path | None):
    """Decode each video in a dataset into gloss tokens."""
    cfg = load_config(config_path)
    model = load_model(model_path)
    lexicon = _load_lexicon(lexicon_path)
    videos, registry = load_dataset(data_path)
    results = []
    for video in videos:
        sign_ids = decode_video(
            model,
            video,
            cfg=cfg.decoder,
            lexicon=lexicon,
            target_fps=cfg.pipeline.target_fps,
            window=cfg.pipeline.window,
        )
        results.append({
            "video_id": video.video_id,
            "sign_ids": sign_ids,
            "tokens": [_gloss_of(model, registry, s) for s in sign_ids],
        })
    if as_json:
        click.echo(json.dumps(results, indent=2))
        return
    for r in results:
        click.echo(f"{r['video_id']}: {' '.join(r['tokens']) if r['tokens'] else '(none)'}")


if __name__ == "__main__":
    main()
