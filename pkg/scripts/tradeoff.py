"""P_D at P_F = 0.01 against the added channel uses, at nominal and x10 legitimate power."""
import argparse
from pathlib import Path

from otadetect import experiments as ex
from otadetect.cli import DEFAULT_TRADEOFF_DELTAS
from otadetect.config import SystemConfig


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--factors", default="1,10", help="legit_power_factor values")
    p.add_argument("--out", type=Path, default=Path("results/tradeoff"))
    args = p.parse_args()

    for factor in map(float, args.factors.split(",")):
        base = SystemConfig(trials=args.trials, seed=args.seed, legit_power_factor=factor)
        points = [pt for s in ex.SCHEMES for pt in ex.tradeoff_curve(base.replace(scheme=s), DEFAULT_TRADEOFF_DELTAS)]
        ex.write_tradeoff(args.out / f"tradeoff_x{factor:g}.csv", points)
        for pt in points:
            print(f"x{factor:<4g} {pt.scheme.value:13s} overhead={pt.overhead_fraction:<6g} "
                  f"P_D={pt.pd:.4f} +/- {pt.pd_stderr:.4f}")


if __name__ == "__main__":
    main()
