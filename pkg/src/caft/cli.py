"""Command-line pipeline: filter -> transform -> loss / lr / spectrum.

Exit codes: 0 success (per-sample skips are logged, not fatal), 2 invalid
input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import spectral, trainutil
from .errors import SymmetryError, ValidationError
from .io import (
    ManifestEntry,
    load_image,
    read_manifest,
    read_partition_report,
    read_probs,
    save_image,
    write_manifest,
    write_partition_report,
    write_provenance_log,
)
from .pseudolabel import build_dictionary, partition
from .transform import DEFAULT_RATIO, build_augmented_set

log = logging.getLogger("caft")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3

PROVENANCE_NAME = "provenance.json"
UNION_MANIFEST_NAME = "union_manifest.jsonl"


def cmd_filter(args) -> int:
    records = read_probs(args.probs)
    report = partition(records, args.method)
    write_partition_report(report, args.out)
    mu = report.params.mu
    print(f"clean={len(report.clean_ids)} noisy={len(report.noisy_ids)} mu=({mu[0]:.6f},{mu[1]:.6f})")
    if report.degenerate:
        log.warning("all scores identical; every sample marked clean")
    return EXIT_OK


def cmd_transform(args) -> int:
    source = read_manifest(args.source_manifest, require_labels=True, resolve=True)
    target = read_manifest(args.target_manifest, resolve=True)
    report = read_partition_report(args.partition)
    for e in source:
        if os.sep in e.id or (os.altsep and os.altsep in e.id):
            raise ValidationError(f"source id {e.id!r} cannot be used in a file name")
    target_paths = {e.id: e.path for e in target}
    dictionary = build_dictionary(report)
    out_dir = Path(args.out_dir)
    transformed, provenance = build_augmented_set(
        source, dictionary, target_paths, ratio=args.window_ratio, fallback=args.fallback,
        seed=args.seed, workers=args.workers, out_dir=out_dir, keep_images=False,
    )
    write_provenance_log(provenance, out_dir / PROVENANCE_NAME)
    union = [ManifestEntry(e.id, os.path.relpath(e.path, out_dir), e.label) for e in source]
    union += [ManifestEntry(f"{t.source_id}__{t.target_id}", t.output, t.label) for t in transformed]
    write_manifest(union, out_dir / UNION_MANIFEST_NAME)
    print(f"transformed={len(transformed)} skipped={len(provenance['skipped'])} "
          f"errors={len(provenance['errors'])}")
    return EXIT_OK


def cmd_loss(args) -> int:
    records = {r.id: r.probs for r in read_probs(args.probs)}
    report = read_partition_report(args.partition)
    clean = [e for e in report.entries if e.verdict == "clean"]
    missing = [e.id for e in clean if e.id not in records]
    if missing:
        raise ValidationError(f"{len(missing)} clean id(s) absent from the probability file, e.g. {missing[0]!r}")
    if not clean:
        print("undefined (0 clean samples)")
        return EXIT_OK
    loss, clipped = trainutil.pseudo_ce_diagnostics(
        [records[e.id] for e in clean], [e.pseudo_label for e in clean])
    if clipped:
        log.warning("%d sample(s) gave their pseudo label probability below %g", clipped, trainutil.LOG_FLOOR)
    print(f"{loss:.6f} ({len(clean)} clean samples)")
    return EXIT_OK


def cmd_lr(args) -> int:
    params = trainutil.ScheduleParams(args.mu0, args.beta, args.epochs)
    print("epoch,lr")
    for epoch in range(params.total_epochs + 1):
        print(f"{epoch},{trainutil.lr_at(params, epoch)!r}")
    return EXIT_OK


def spectrum_view(img, mode: str = "magnitude") -> np.ndarray:
    """8-bit visualisation of the dc-centered spectrum, one plane per channel."""
    centred = spectral.shift_center(spectral.dft2(img))
    magnitude, phase = spectral.to_polar(centred)
    if mode == "magnitude":
        planes = np.log1p(magnitude)
        peak = planes.max(axis=(1, 2), keepdims=True)
        planes = np.divide(planes * 255.0, peak, out=np.zeros_like(planes), where=peak > 0)
    elif mode == "phase":
        planes = (phase + np.pi) / (2 * np.pi) * 255.0
    else:
        raise ValidationError(f"mode must be 'magnitude' or 'phase', got {mode!r}")
    return np.moveaxis(planes, 0, -1)


def cmd_spectrum(args) -> int:
    save_image(spectrum_view(load_image(args.image), args.mode), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="caft", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="split pseudo labels into clean and noisy sets")
    p.add_argument("--probs", required=True, help="JSON-lines file of {id, probs}")
    p.add_argument("--out", required=True, help="partition report to write")
    p.add_argument("--method", choices=("adt2p", "entropy"), default="adt2p")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the fit uses no randomness")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("transform", help="swap low-frequency magnitudes with class-matched targets")
    p.add_argument("--source-manifest", required=True)
    p.add_argument("--target-manifest", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--window-ratio", type=float, default=DEFAULT_RATIO)
    p.add_argument("--fallback", choices=("random", "skip"), default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("loss", help="pseudo-label cross-entropy over the clean set")
    p.add_argument("--probs", required=True)
    p.add_argument("--partition", required=True)
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("lr", help="print the learning-rate schedule")
    p.add_argument("--mu0", type=float, default=trainutil.DEFAULT_MU0)
    p.add_argument("--beta", type=float, default=trainutil.DEFAULT_BETA)
    p.add_argument("--epochs", type=int, required=True)
    p.set_defaults(func=cmd_lr)

    p = sub.add_parser("spectrum", help="render a log-magnitude or phase spectrum")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("magnitude", "phase"), default="magnitude")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (SymmetryError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
