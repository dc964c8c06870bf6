"""Command-line entry point: ``otadetect {roc,tradeoff,hist,validate-moments}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .config import CALIBRATIONS, ENGINES, load_config
from .dummy_schemes import SchemeKind
from .errors import ConfigError, ParameterError

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION = 0, 2, 3
DEFAULT_TRADEOFF_DELTAS = (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)

log = logging.getLogger("otadetect")


def _delta_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of floats: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key: value file of SystemConfig fields")
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--scheme", choices=[s.value for s in SchemeKind],
                        help="default: both schemes (validate-moments: config value)")
    common.add_argument("--delta", type=_delta_list, help="ratio D/L; comma-separated for several")
    common.add_argument("--attack", choices=["none", "gaussian", "idle", "scaled"])
    common.add_argument("--power-scale", type=float)
    common.add_argument("--legit-power-factor", type=float)
    common.add_argument("--engine", choices=ENGINES)
    common.add_argument("--calibration", choices=CALIBRATIONS)
    common.add_argument("--workers", type=int)
    common.add_argument("--dump-trials", action="store_true", help="also write per-trial records")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="otadetect", description="Active-attack detection in over-the-air computation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("roc", parents=[common], help="ROC curves (roc.csv)")
    sub.add_parser("tradeoff", parents=[common], help="P_D vs added channel uses (tradeoff.csv)")
    sub.add_parser("hist", parents=[common], help="energy histograms (hist.csv)")
    sub.add_parser("validate-moments", parents=[common], help="closed-form moment check (moments.csv)")
    return parser


def _base_config(args):
    overrides = dict(trials=args.trials, seed=args.seed, attack=args.attack, power_scale=args.power_scale,
                     legit_power_factor=args.legit_power_factor, engine=args.engine,
                     calibration=args.calibration, workers=args.workers)
    if args.delta and len(args.delta) == 1:
        overrides["delta"] = args.delta[0]
    if args.scheme:
        overrides["scheme"] = args.scheme
    return load_config(args.config, **overrides)


def _schemes(args):
    return [SchemeKind(args.scheme)] if args.scheme else list(ex.SCHEMES)


def _dump(args, runs):
    """``runs`` is a list of (label, batches)."""
    if not args.dump_trials:
        return
    for label, batches in runs:
        name = "trials.csv" if len(runs) == 1 else f"trials_{label}.csv"
        ex.write_trials(args.out / name, batches)


def run(args) -> int:
    base = _base_config(args)
    deltas = args.delta or [base.delta]

    if args.command == "roc":
        curves = [ex.roc_curve(base.replace(scheme=s, delta=d)) for s in _schemes(args) for d in deltas]
        ex.write_roc(args.out / "roc.csv", curves)
        for c in curves:
            print(f"{c.scheme.value:13s} delta={c.delta:<8g} AUC={c.auc:.4f}")
        _dump(args, [(f"{c.scheme.value}_{c.delta:g}", [c.h0, c.h1]) for c in curves])

    elif args.command == "tradeoff":
        deltas = args.delta or list(DEFAULT_TRADEOFF_DELTAS)
        points = [p for s in _schemes(args) for p in ex.tradeoff_curve(base.replace(scheme=s), deltas)]
        ex.write_tradeoff(args.out / "tradeoff.csv", points)
        for p in points:
            print(f"{p.scheme.value:13s} delta={p.delta:<8g} overhead={p.overhead_fraction:.4f} "
                  f"P_D={p.pd:.4f} +/- {p.pd_stderr:.4f}")
        _dump(args, [(f"{p.scheme.value}_{p.delta:g}", [p.h1]) for p in points])

    elif args.command == "hist":
        hists = [h for d in deltas for h in ex.histogram_export(base.replace(delta=d), _schemes(args))]
        ex.write_hist(args.out / "hist.csv", hists)
        for h in hists:
            print(f"{h.scheme.value:13s} delta={h.delta:<8g} overlap={h.overlap:.4f}")
        _dump(args, [(f"{h.scheme.value}_{h.delta:g}", [h.h0, h.h1]) for h in hists])

    elif args.command == "validate-moments":
        schemes = [base.scheme] if args.scheme or args.config else list(ex.SCHEMES)
        reports = [ex.validate_moments(base.replace(scheme=s, delta=d)) for s in schemes for d in deltas]
        ex.write_moments(args.out / "moments.csv", reports)
        for rep in reports:
            for r in rep.rows:
                print(f"{r.scheme.value:13s} {r.moment:8s} theory={r.theory:.4f} empirical={r.empirical:.4f} "
                      f"se={r.stderr:.4f} {'PASS' if r.passed else 'FAIL'}")
        labels = [f"{s.value}_{d:g}" for s in schemes for d in deltas]
        _dump(args, [(lab, [rep.h0, rep.h1]) for lab, rep in zip(labels, reports)])
        if not all(rep.passed for rep in reports):
            return EXIT_VALIDATION
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (ConfigError, ParameterError) as exc:
        print(f"otadetect: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
