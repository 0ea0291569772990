"""Sweep the window ratio on one source/target pair and save a montage.

Larger ratios move more of the target's colour and illumination into the
source; past a few percent ringing from the hard window edge shows up.

    python scripts/window_sweep.py --out sweep.png
"""

import argparse

import numpy as np

from caft.io import load_image, save_image
from caft.synthetic import styled_image
from caft.transform import compute_window, prepare_pair, swap_low_freq

RATIOS = (0.0, 0.01, 0.02, 0.04, 0.08, 0.15, 0.3)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--source", help="source image (default: a synthetic one)")
    ap.add_argument("--target", help="target image (default: a synthetic one)")
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--out", default="window_sweep.png")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    src = load_image(args.source) if args.source else styled_image(rng, 2, "source", args.size)
    tgt = load_image(args.target) if args.target else styled_image(rng, 2, "target", args.size)
    src, tgt = prepare_pair(src, tgt)
    h, w, _ = src.shape

    tiles = [src]
    print("ratio  side  mean|change|  clipped")
    for ratio in RATIOS:
        raw = swap_low_freq(src, tgt, ratio, clip=False)
        clipped = int(np.count_nonzero((raw < 0) | (raw > 255)))
        out = np.clip(raw, 0, 255)
        print(f"{ratio:5.2f}  {compute_window(h, w, ratio).side:4d}  {np.abs(out - src).mean():12.3f}  {clipped:7d}")
        tiles.append(out)
    tiles.append(tgt)
    gap = np.full((h, 4, src.shape[2]), 255.0)
    save_image(np.concatenate([t for tile in tiles for t in (tile, gap)][:-1], axis=1), args.out)
    print(f"wrote {args.out}: source, {len(RATIOS)} ratios, target")


if __name__ == "__main__":
    main()
