"""Time the filter + transform pipeline on a generated corpus.

    python scripts/bench_transform.py --n-source 1000 --n-target 200 --size 224 --workers 8
"""

import argparse
import os
import tempfile
import time
from pathlib import Path

import numpy as np

from caft.io import read_manifest, read_probs
from caft.pseudolabel import build_dictionary, partition
from caft.synthetic import make_toy_corpus
from caft.transform import build_augmented_set, swap_low_freq


def single_swap_ms(size: int, repeats: int = 20) -> float:
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 255, (size, size, 3))
    b = rng.uniform(0, 255, (size, size, 3))
    swap_low_freq(a, b)
    t = time.perf_counter()
    for _ in range(repeats):
        swap_low_freq(a, b)
    return (time.perf_counter() - t) / repeats * 1e3


def run(root: Path, n_source: int, n_target: int, size: int, workers: int, classes: int) -> float:
    src, tgt, probs = make_toy_corpus(root / "data", n_source, n_target, classes, size, seed=0)
    t = time.perf_counter()
    report = partition(read_probs(probs))
    targets = read_manifest(tgt, resolve=True)
    images, _ = build_augmented_set(
        read_manifest(src, require_labels=True, resolve=True), build_dictionary(report),
        {e.id: e.path for e in targets}, fallback="random", seed=42, workers=workers,
        out_dir=root / "out", keep_images=False,
    )
    elapsed = time.perf_counter() - t
    assert len(images) == n_source
    return elapsed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-source", type=int, default=1000)
    ap.add_argument("--n-target", type=int, default=200)
    ap.add_argument("--classes", type=int, default=10)
    ap.add_argument("--size", type=int, default=224)
    ap.add_argument("--workers", type=int, default=8)
    args = ap.parse_args()
    print(f"cpus={os.cpu_count()} single swap {args.size}px: {single_swap_ms(args.size):.1f} ms")
    with tempfile.TemporaryDirectory() as tmp:
        secs = run(Path(tmp), args.n_source, args.n_target, args.size, args.workers, args.classes)
    print(f"{args.n_source} images, {args.workers} workers: {secs:.2f} s")


if __name__ == "__main__":
    main()
