"""Deterministic toy data: class-styled images and planted prediction files."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .io import ManifestEntry, save_image, write_manifest, write_probs
from .pseudolabel import PredictionRecord


def probs_with_gap(label: int, gap: float, n_classes: int) -> np.ndarray:
    """Probability vector whose argmax is ``label`` and whose top-2 gap is ``gap``."""
    base = (1.0 - gap) / n_classes
    p = np.full(n_classes, base)
    p[label] += gap
    return p


def planted_predictions(rng: np.random.Generator, truth: list[int], n_classes: int,
                        p_correct: float = 0.6, high=(0.80, 0.05), low=(0.10, 0.02),
                        prefix: str = "t"):
    """Predictions where correct samples get a wide top-2 gap and wrong ones a narrow gap.

    Returns ``(records, correct_mask)``.
    """
    records, correct = [], []
    for i, y in enumerate(truth):
        ok = bool(rng.random() < p_correct)
        if ok:
            label = y
            gap = rng.normal(*high)
        else:
            label = int((y + 1 + rng.integers(n_classes - 1)) % n_classes)
            gap = rng.normal(*low)
        gap = float(np.clip(gap, 0.01, 0.99))
        records.append(PredictionRecord(f"{prefix}{i:04d}", probs_with_gap(label, gap, n_classes)))
        correct.append(ok)
    return records, np.array(correct)


def styled_image(rng: np.random.Generator, label: int, domain: str, size: int = 32,
                 channels: int = 3) -> np.ndarray:
    """Smooth class-dependent pattern plus a domain-dependent colour cast and noise."""
    yy, xx = np.mgrid[0:size, 0:size] / size
    freq = 1 + label
    pattern = 0.5 + 0.5 * np.sin(2 * np.pi * freq * xx) * np.cos(2 * np.pi * yy)
    cast = np.array([0.9, 0.6, 0.3]) if domain == "source" else np.array([0.3, 0.5, 0.9])
    cast = cast[:channels] if channels <= 3 else np.ones(channels)
    img = 40 + 170 * pattern[:, :, None] * cast[None, None, :]
    img = img + rng.normal(0, 8, img.shape)
    return np.clip(img, 0, 255)


def make_toy_corpus(root, n_source: int = 8, n_target: int = 8, n_classes: int = 4,
                    size: int = 32, seed: int = 0, p_correct: float = 0.75):
    """Write source/target images, manifests and a target probability file under ``root``.

    Returns the paths of the source manifest, target manifest and probs file.
    """
    root = Path(root)
    rng = np.random.default_rng(seed)
    for d in ("source", "target"):
        (root / d).mkdir(parents=True, exist_ok=True)
    src_entries = []
    for i in range(n_source):
        label = i % n_classes
        sid = f"s{i:04d}"
        save_image(styled_image(rng, label, "source", size), root / "source" / f"{sid}.png")
        src_entries.append(ManifestEntry(sid, f"source/{sid}.png", label))
    tgt_entries, truth = [], []
    for i in range(n_target):
        label = i % n_classes
        tid = f"t{i:04d}"
        save_image(styled_image(rng, label, "target", size), root / "target" / f"{tid}.png")
        tgt_entries.append(ManifestEntry(tid, f"target/{tid}.png"))
        truth.append(label)
    records, _ = planted_predictions(rng, truth, n_classes, p_correct=p_correct)
    paths = (root / "source.jsonl", root / "target.jsonl", root / "probs.jsonl")
    write_manifest(src_entries, paths[0])
    write_manifest(tgt_entries, paths[1])
    write_probs(records, paths[2])
    with open(root / "truth.jsonl", "w", encoding="utf-8") as fh:
        for tid, y in zip((e.id for e in tgt_entries), truth):
            fh.write(f'{{"id": "{tid}", "label": {y}}}\n')
    return paths
