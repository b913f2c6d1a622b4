"""Compare the compiled encoder kernel against the pure-numpy fallback.

Runs itself twice as a subprocess, once per SIGNSTREAM_ENCODER value, so
each side goes through the real import-time backend selection. Reports
per-window timing for both and the worst element difference between them.

Usage: python3 benchmarks/encoder_bench.py [--windows N] [--repeats R]
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np


def build_windows(count: int):
    from signstream.pipeline import windows_of
    from signstream.synthetic import make_templates, sample_video

    templates = make_templates(8, seed=11)
    rng = np.random.default_rng(11)
    windows = []
    k = 0
    while len(windows) < count:
        t = templates[k % len(templates)]
        video = sample_video(t, f"bench{k:03d}", 24.0, rng)
        windows.extend(windows_of(video))
        k += 1
    return windows[:count]


def run_child(count: int, repeats: int, dump: Path) -> None:
    from signstream.features import active_backend, encode_window

    windows = build_windows(count)
    for w in windows:  # warm-up pass, also the dumped output
        encode_window(w)
    features = np.stack([encode_window(w) for w in windows])
    np.save(dump, features)

    per_window_us = []
    for _ in range(repeats):
        start = time.perf_counter()
        for w in windows:
            encode_window(w)
        elapsed = time.perf_counter() - start
        per_window_us.append(elapsed / len(windows) * 1e6)
    print(json.dumps({
        "backend": active_backend(),
        "windows": len(windows),
        "median_us": statistics.median(per_window_us),
        "best_us": min(per_window_us),
    }))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--windows", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    parser.add_argument("--dump", type=Path, help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        run_child(args.windows, args.repeats, args.dump)
        return

    results = {}
    dumps = {}
    with tempfile.TemporaryDirectory() as tmp:
        for backend in ("python", "cython"):
            dump = Path(tmp) / f"{backend}.npy"
            env = dict(os.environ, SIGNSTREAM_ENCODER=backend)
            cmd = [sys.executable, __file__, "--child",
                   "--windows", str(args.windows), "--repeats", str(args.repeats),
                   "--dump", str(dump)]
            try:
                out = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True)
            except subprocess.CalledProcessError as exc:
                sys.exit(f"{backend} backend failed:\n{exc.stderr}")
            results[backend] = json.loads(out.stdout)
            dumps[backend] = np.load(dump)

    diff = float(np.max(np.abs(dumps["python"] - dumps["cython"])))
    print(f"windows: {args.windows}, repeats: {args.repeats} "
          f"(median of per-window means)")
    for backend in ("python", "cython"):
        r = results[backend]
        print(f"  {backend:7s} {r['median_us']:9.2f} us/window "
              f"(best {r['best_us']:.2f})")
    speedup = results["python"]["median_us"] / results["cython"]["median_us"]
    print(f"  speedup {speedup:.1f}x, max |python - cython| = {diff:.3g}")
    if diff > 1e-12:
        sys.exit("FAIL: backends disagree beyond 1e-12")


if __name__ == "__main__":
    main()
