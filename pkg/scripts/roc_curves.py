"""ROC curves of both designs for a few dummy ratios (writes roc.csv)."""
import argparse
from pathlib import Path

from otadetect import experiments as ex
from otadetect.config import SystemConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deltas", default="0.005,0.01,0.1")
    p.add_argument("--out", type=Path, default=Path("results/roc"))
    args = p.parse_args()

    base = SystemConfig(trials=args.trials, seed=args.seed)
    curves = [ex.roc_curve(base.replace(scheme=s, delta=float(d)))
              for s in ex.SCHEMES for d in args.deltas.split(",")]
    ex.write_roc(args.out / "roc.csv", curves)
    for c in curves:
        print(f"{c.scheme.value:13s} delta={c.delta:<6g} AUC={c.auc:.4f}")


if __name__ == "__main__":
    main()
