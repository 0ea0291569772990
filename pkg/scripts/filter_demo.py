"""Compare the top-2 gap and entropy scores as clean/noisy filters on planted predictions.

    python scripts/filter_demo.py --n 5000 --classes 10 --p-correct 0.6
"""

import argparse

import numpy as np

from caft.pseudolabel import evaluate, partition
from caft.synthetic import planted_predictions


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--classes", type=int, default=10)
    ap.add_argument("--p-correct", type=float, default=0.6)
    ap.add_argument("--high", type=float, nargs=2, default=(0.55, 0.15), metavar=("MEAN", "SD"),
                    help="top-2 gap distribution of correct predictions")
    ap.add_argument("--low", type=float, nargs=2, default=(0.2, 0.1), metavar=("MEAN", "SD"),
                    help="top-2 gap distribution of wrong predictions")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    truth = [i % args.classes for i in range(args.n)]
    records, correct = planted_predictions(rng, truth, args.classes, p_correct=args.p_correct,
                                           high=tuple(args.high), low=tuple(args.low))
    labels = {r.id: y for r, y in zip(records, truth)}
    print(f"{args.n} predictions, {correct.mean():.1%} correct before filtering")
    for method in ("adt2p", "entropy"):
        report = partition(records, method=method)
        m = evaluate(report, labels)
        lo, hi = report.params.mu
        print(f"{method:8s} clean={m['clean']:5d} precision={m['precision']:.4f} "
              f"recall={m['recall']:.4f} mu=({lo:.4f}, {hi:.4f})")


if __name__ == "__main__":
    main()
