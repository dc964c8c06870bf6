"""Histograms of the received dummy energy under both hypotheses (one CSV per ratio)."""
import argparse
from pathlib import Path

from otadetect import experiments as ex
from otadetect.config import SystemConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deltas", default="0.01,0.1,0.5")
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--out", type=Path, default=Path("results/hist"))
    args = p.parse_args()

    for d in map(float, args.deltas.split(",")):
        hists = ex.histogram_export(SystemConfig(trials=args.trials, seed=args.seed, delta=d, hist_bins=args.bins))
        ex.write_hist(args.out / f"hist_delta{d:g}.csv", hists)
        print(f"delta={d:<5g} " + "  ".join(f"{h.scheme.value}: overlap={h.overlap:.4f}" for h in hists))


if __name__ == "__main__":
    main()
