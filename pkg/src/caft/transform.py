"""Class-aware low-frequency magnitude swapping.

A source image keeps its phase everywhere and its magnitude outside a small
square centred on DC; inside that square it takes the magnitude of a target
image that the pseudo-labelling stage assigned to the source's class.
"""

from __future__ import annotations

import logging
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Mapping, Sequence

import numpy as np

from . import spectral
from .errors import FormatError, ValidationError
from .io.images import load_image, save_image
from .io.manifest import ManifestEntry

log = logging.getLogger(__name__)

DEFAULT_RATIO = 0.04

Fallback = Literal["random", "skip"]


@dataclass(frozen=True)
class WindowSpec:
    ratio: float
    side: int
    height: int
    width: int

    @property
    def rows(self) -> slice:
        start = self.height // 2 - self.side // 2
        return slice(start, start + self.side)

    @property
    def cols(self) -> slice:
        start = self.width // 2 - self.side // 2
        return slice(start, start + self.side)

    def origin_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Open-mesh row/column indices of the window in the dc-at-origin layout."""
        rows = (np.arange(self.rows.start, self.rows.stop) - self.height // 2) % self.height
        cols = (np.arange(self.cols.start, self.cols.stop) - self.width // 2) % self.width
        return rows[:, None], cols[None, :]

    def mask(self) -> np.ndarray:
        """Boolean ``(H, W)`` mask of the window in the dc-centered layout."""
        m = np.zeros((self.height, self.width), dtype=bool)
        m[self.rows, self.cols] = True
        return m


def compute_window(height: int, width: int, ratio: float = DEFAULT_RATIO) -> WindowSpec:
    """Square window of side ``floor(2 * ratio * min(height, width))``.

    The window sits on the DC bin at ``(height // 2, width // 2)`` and spans
    ``side // 2`` bins above/left of it, the rest below/right.
    """
    if height < 1 or width < 1:
        raise ValidationError(f"image dimensions must be positive, got {height}x{width}")
    if not (0.0 <= ratio <= 0.5) or math.isnan(ratio):
        raise ValidationError(f"window ratio must lie in [0, 0.5], got {ratio}")
    # absorb representation error such as 2 * 0.29 * 100 == 57.999...
    side = math.floor(2.0 * ratio * min(height, width) + 1e-9)
    side = min(side, min(height, width))
    return WindowSpec(ratio=ratio, side=side, height=height, width=width)


def low_freq_magnitude(img, window: WindowSpec, backend: spectral.Backend = "numpy") -> np.ndarray:
    """Magnitudes of ``img``'s dc-centered spectrum inside ``window``, shape ``(C, side, side)``."""
    rows, cols = window.origin_index()
    box = spectral.dft2(img, backend).data[:, rows, cols]
    return spectral.to_polar(spectral.Spectrum(box, "dc-centered"))[0]


def impose_low_freq(src, magnitude: np.ndarray, window: WindowSpec, *, clip: bool = True,
                    backend: spectral.Backend = "numpy") -> np.ndarray:
    """Replace ``src``'s window magnitudes by ``magnitude``, keeping its phase everywhere."""
    src = spectral.as_image(src)
    if window.side == 0:
        out = src.copy()
    else:
        # index the window where it lives instead of rolling whole spectra
        rows, cols = window.origin_index()
        mixed = spectral.dft2(src, backend)
        _, phase = spectral.to_polar(spectral.Spectrum(mixed.data[:, rows, cols], "dc-centered"))
        mixed.data[:, rows, cols] = spectral.from_polar(magnitude, phase, "dc-centered").data
        if window.side % 2 == 0:
            # an even side leaves one edge row/column without its mirror bin
            mixed = spectral.hermitian_part(mixed)
        out = spectral.idft2(mixed, backend)
    if clip:
        out = np.clip(out, 0.0, 255.0)
    return out


def swap_low_freq(src, tgt, ratio: float = DEFAULT_RATIO, *, clip: bool = True,
                  backend: spectral.Backend = "numpy") -> np.ndarray:
    """Give ``src`` the low-frequency magnitude of ``tgt``.

    Both images must share one shape; see :func:`prepare_pair`. With
    ``clip=False`` the synthesised image is returned before clamping to
    [0, 255].
    """
    src = spectral.as_image(src)
    tgt = spectral.as_image(tgt)
    if src.shape != tgt.shape:
        raise ValidationError(f"source {src.shape} and target {tgt.shape} shapes differ")
    window = compute_window(src.shape[0], src.shape[1], ratio)
    if window.side == 0:
        return np.clip(src, 0.0, 255.0) if clip else src.copy()
    return impose_low_freq(src, low_freq_magnitude(tgt, window, backend), window, clip=clip, backend=backend)


def count_clipped(img: np.ndarray) -> int:
    return int(np.count_nonzero((img < 0.0) | (img > 255.0)))


def prepare_pair(src, tgt) -> tuple[np.ndarray, np.ndarray]:
    """Resize ``tgt`` to ``src``'s height and width (bilinear, corners aligned)."""
    src = spectral.as_image(src)
    tgt = spectral.as_image(tgt)
    if src.shape[2] != tgt.shape[2]:
        raise ValidationError(f"channel mismatch: source has {src.shape[2]}, target has {tgt.shape[2]}")
    if src.shape == tgt.shape:
        return src, tgt
    return src, resize_bilinear(tgt, src.shape[0], src.shape[1])


def resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w, _ = img.shape

    def axis(n_in, n_out):
        if n_out == 1 or n_in == 1:
            pos = np.zeros(n_out)
        else:
            pos = np.arange(n_out) * ((n_in - 1) / (n_out - 1))
        lo = np.minimum(np.floor(pos).astype(np.intp), n_in - 1)
        hi = np.minimum(lo + 1, n_in - 1)
        return lo, hi, pos - lo

    y0, y1, fy = axis(h, out_h)
    x0, x1, fx = axis(w, out_w)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bottom = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy


@dataclass
class TransformedImage:
    image: np.ndarray | None
    source_id: str
    target_id: str
    label: int
    window: WindowSpec
    clipped_pixels: int = 0
    fallback: bool = False
    output: str | None = None


@dataclass(frozen=True)
class _Assignment:
    index: int
    entry: ManifestEntry
    target_id: str | None
    fallback: bool
    skip_reason: str | None = None


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one source sample, fixed by (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index]))


def output_name(source_id: str, target_id: str) -> str:
    return f"{source_id}__{target_id}.png"


def plan_assignments(source: Sequence[ManifestEntry], targets: Mapping[int, Sequence[str]],
                     fallback: Fallback = "random", seed: int = 0) -> list[_Assignment]:
    """Pick a style donor for every source sample."""
    if fallback not in ("random", "skip"):
        raise ValidationError(f"fallback must be 'random' or 'skip', got {fallback!r}")
    pool = [tid for key in sorted(targets) for tid in targets[key]]
    plan = []
    for i, entry in enumerate(source):
        if entry.label is None:
            raise ValidationError(f"source sample {entry.id!r} has no label")
        candidates = targets.get(entry.label) or []
        rng = sample_rng(seed, i)
        if candidates:
            tid = candidates[int(rng.integers(len(candidates)))]
            plan.append(_Assignment(i, entry, tid, False))
        elif fallback == "skip":
            plan.append(_Assignment(i, entry, None, False,
                                    f"no clean target with pseudo label {entry.label}"))
        else:
            if not pool:
                raise ValidationError("target dictionary is empty; random fallback has nothing to draw from")
            tid = pool[int(rng.integers(len(pool)))]
            plan.append(_Assignment(i, entry, tid, True))
    return plan


def build_augmented_set(source: Sequence[ManifestEntry], targets: Mapping[int, Sequence[str]],
                        target_paths: Mapping[str, str | os.PathLike], ratio: float = DEFAULT_RATIO,
                        fallback: Fallback = "random", seed: int = 0, workers: int = 1,
                        out_dir: str | os.PathLike | None = None, keep_images: bool = True,
                        backend: spectral.Backend = "numpy") -> tuple[list[TransformedImage], dict]:
    """Transform every source sample with a class-matched target.

    Returns the transformed images in source order plus a provenance log
    that references the untouched originals next to the transformed copies,
    so a trainer can consume their union. When ``out_dir`` is given every
    image is written there as ``<source_id>__<target_id>.png`` by the worker
    that produced it.
    """
    if workers < 1:
        raise ValidationError(f"workers must be positive, got {workers}")
    compute_window(1, 1, ratio)
    pseudo_label = {tid: key for key, ids in targets.items() for tid in ids}
    for tid in pseudo_label:
        if tid not in target_paths:
            raise ValidationError(f"target id {tid!r} from the dictionary is not in the target manifest")
    plan = plan_assignments(source, targets, fallback, seed)
    out_path = None if out_dir is None else Path(out_dir)
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    cache: dict[tuple, np.ndarray] = {}
    cache_lock = threading.Lock()

    def target_magnitude(tid: str, src_shape, window: WindowSpec) -> np.ndarray:
        # a pure function of (target, shape, window), so sharing it keeps runs deterministic
        key = (tid, src_shape, window.side)
        with cache_lock:
            hit = cache.get(key)
        if hit is None:
            _, tgt = prepare_pair(np.zeros(src_shape), load_image(target_paths[tid]))
            hit = low_freq_magnitude(tgt, window, backend)
            with cache_lock:
                cache[key] = hit
        return hit

    def run(a: _Assignment):
        if a.target_id is None:
            return None
        try:
            src = spectral.as_image(load_image(a.entry.path))
            window = compute_window(src.shape[0], src.shape[1], ratio)
            magnitude = target_magnitude(a.target_id, src.shape, window)
        except (OSError, FormatError, ValidationError) as exc:
            return exc
        raw = impose_low_freq(src, magnitude, window, clip=False, backend=backend)
        clipped = count_clipped(raw)
        img = np.clip(raw, 0.0, 255.0)
        name = None
        if out_path is not None:
            name = output_name(a.entry.id, a.target_id)
            save_image(img, out_path / name)
        return TransformedImage(img if keep_images else None, a.entry.id, a.target_id,
                                a.entry.label, window, clipped, a.fallback, name)

    if workers == 1:
        results = [run(a) for a in plan]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, plan))

    transformed, skipped, errors = [], [], []
    for a, res in zip(plan, results):
        if a.target_id is None:
            skipped.append({"source_id": a.entry.id, "label": a.entry.label, "reason": a.skip_reason})
            log.info("skipped %s: %s", a.entry.id, a.skip_reason)
        elif isinstance(res, Exception):
            errors.append({"source_id": a.entry.id, "target_id": a.target_id, "reason": str(res)})
            log.warning("failed %s with target %s: %s", a.entry.id, a.target_id, res)
        else:
            if res.clipped_pixels:
                log.debug("%s: %d values clipped to [0, 255]", res.source_id, res.clipped_pixels)
            transformed.append(res)

    provenance = {
        "window_ratio": ratio,
        "fallback": fallback,
        "seed": seed,
        "originals": [{"id": e.id, "label": e.label} for e in source],
        "transformed": [
            {
                "source_id": t.source_id,
                "target_id": t.target_id,
                "label": t.label,
                "target_pseudo_label": pseudo_label[t.target_id],
                "fallback": t.fallback,
                "window_side": t.window.side,
                "clipped_pixels": t.clipped_pixels,
                "output": t.output,
            }
            for t in transformed
        ],
        "skipped": skipped,
        "errors": errors,
    }
    return transformed, provenance
