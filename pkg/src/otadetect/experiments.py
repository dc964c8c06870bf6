"""Monte Carlo experiments: ROC curves, detection/overhead trade-off, energy
histograms, and the closed-form moment check. CSV writers live here too.

Detection decisions are taken on the statistic normalized by the block's own
effective noise variance, i.e. with a per-block threshold proportional to
sigma_tilde^2. The server knows eta and K_active, so this is a deployable
detector, and it makes the H0 law Erlang(D, 1) for every block.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .attacker import AttackKind
from .config import SystemConfig
from .detector import Hypothesis, theoretical_moments
from .dummy_schemes import SchemeKind
from .errors import ConfigError, ParameterError
from .numerics import erlang_quantile
from .trials import TrialBatch, run_trials

SCHEMES = (SchemeKind.CORRELATED, SchemeKind.UNCORRELATED)


@dataclass(frozen=True)
class RocPoint:
    pf: float
    pd: float
    threshold: float


@dataclass
class RocCurve:
    scheme: SchemeKind
    delta: float
    threshold: np.ndarray
    pf: np.ndarray
    pd: np.ndarray
    auc: float
    h0: TrialBatch | None = None
    h1: TrialBatch | None = None

    @property
    def points(self) -> list[RocPoint]:
        return [RocPoint(float(f), float(d), float(t)) for f, d, t in zip(self.pf, self.pd, self.threshold)]


def roc_from_statistics(s0: np.ndarray, s1: np.ndarray):
    """Empirical ROC staircase of the rule ``stat > threshold``.

    Thresholds sweep every pooled value from the largest (giving (0, 0)) down
    to 0 (giving (1, 1)). Returns thresholds, pf, pd and the trapezoidal AUC.
    """
    s0 = np.sort(np.asarray(s0, dtype=float))
    s1 = np.sort(np.asarray(s1, dtype=float))
    if s0.size == 0 or s1.size == 0:
        raise ParameterError("both hypotheses need at least one sample")
    thr = np.unique(np.concatenate([s0, s1]))[::-1]
    thr = np.append(thr, 0.0 if thr[-1] > 0 else thr[-1] - 1.0)
    pf = (s0.size - np.searchsorted(s0, thr, side="right")) / s0.size
    pd = (s1.size - np.searchsorted(s1, thr, side="right")) / s1.size
    auc = float(np.sum(np.diff(pf) * (pd[1:] + pd[:-1]) / 2))
    return thr, pf, pd, auc


def _split(trials: int) -> tuple[int, int]:
    n0 = trials // 2
    return n0, trials - n0


def roc_curve(config: SystemConfig) -> RocCurve:
    """ROC from ``trials/2`` H0 and ``trials/2`` H1 blocks, by threshold sweep."""
    if config.trials < 1000:
        raise ConfigError("ROC needs at least 1000 trials")
    n0, n1 = _split(config.trials)
    h0 = run_trials(config, Hypothesis.H0, n0)
    h1 = run_trials(config, Hypothesis.H1, n1)
    thr, pf, pd, auc = roc_from_statistics(h0.normalized, h1.normalized)
    return RocCurve(config.scheme, config.delta, thr, pf, pd, auc, h0, h1)


@dataclass
class TradeoffPoint:
    scheme: SchemeKind
    delta: float
    D: int
    overhead_fraction: float
    target_pf: float
    pd: float
    pd_stderr: float
    h1: TrialBatch | None = None


def detection_probability(config: SystemConfig, h1: TrialBatch, h0: TrialBatch | None = None):
    """P_D at ``config.target_pf`` with the analytic (or empirical) threshold."""
    if config.calibration == "empirical":
        if h0 is None:
            raise ParameterError("empirical calibration needs H0 trials")
        gamma = np.quantile(h0.normalized, 1 - config.target_pf)
    else:
        gamma = erlang_quantile(config.target_pf, config.D, 1.0)
    pd = float(np.mean(h1.normalized > gamma))
    return pd, float(np.sqrt(pd * (1 - pd) / len(h1)))


def tradeoff_curve(config: SystemConfig, delta_list) -> list[TradeoffPoint]:
    out = []
    for delta in delta_list:
        cfg = config.replace(delta=float(delta))
        h1 = run_trials(cfg, Hypothesis.H1)
        h0 = run_trials(cfg, Hypothesis.H0) if cfg.calibration == "empirical" else None
        pd, se = detection_probability(cfg, h1, h0)
        out.append(TradeoffPoint(cfg.scheme, cfg.delta, cfg.D, cfg.D / cfg.L, cfg.target_pf, pd, se, h1))
    return out


@dataclass
class Histogram:
    scheme: SchemeKind
    delta: float
    edges: np.ndarray
    counts_h0: np.ndarray
    counts_h1: np.ndarray
    h0: TrialBatch | None = None
    h1: TrialBatch | None = None

    @property
    def overlap(self) -> float:
        return overlap_coefficient(self.counts_h0, self.counts_h1)


def overlap_coefficient(c0, c1) -> float:
    """Shared area of two histograms after normalizing each to unit mass."""
    p0 = np.asarray(c0, dtype=float) / np.sum(c0)
    p1 = np.asarray(c1, dtype=float) / np.sum(c1)
    return float(np.minimum(p0, p1).sum())


def energy_histogram(s0, s1, bins: int):
    """Fixed-width bins in log10(energy) spanning the pooled range."""
    l0, l1 = np.log10(s0), np.log10(s1)
    lo = min(l0.min(), l1.min())
    hi = max(l0.max(), l1.max())
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    return 10**edges, np.histogram(l0, edges)[0], np.histogram(l1, edges)[0]


def histogram_export(config: SystemConfig, schemes=SCHEMES) -> list[Histogram]:
    """Histograms of the raw energy ||y_d||^2 under both hypotheses, per scheme."""
    if config.trials < 10_000:
        raise ConfigError("histograms need at least 10^4 trials")
    out = []
    for scheme in schemes:
        cfg = config.replace(scheme=SchemeKind(scheme))
        h0 = run_trials(cfg, Hypothesis.H0)
        h1 = run_trials(cfg, Hypothesis.H1)
        edges, c0, c1 = energy_histogram(h0.statistic, h1.statistic, cfg.hist_bins)
        out.append(Histogram(cfg.scheme, cfg.delta, edges, c0, c1, h0, h1))
    return out


@dataclass(frozen=True)
class MomentCheck:
    scheme: SchemeKind
    moment: str
    theory: float
    empirical: float
    stderr: float

    @property
    def passed(self) -> bool:
        return abs(self.empirical - self.theory) <= 3 * self.stderr


@dataclass
class MomentsReport:
    rows: list[MomentCheck]
    h0: TrialBatch | None = None
    h1: TrialBatch | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _ratio_check(scheme, name, values) -> MomentCheck:
    return MomentCheck(scheme, name, 1.0, float(np.mean(values)),
                       float(np.std(values, ddof=1) / np.sqrt(values.size)))


def validate_moments(config: SystemConfig) -> MomentsReport:
    """Compare Monte Carlo moments of ||y_d||^2 with the closed forms.

    Every block has its own eta, beta and K_active, so the check is done per
    block and pooled: the ``mean`` rows average stat / E[stat], the ``var``
    rows average (stat - E[stat])^2 / Var[stat]. Both have expectation 1
    when the closed forms hold.
    """
    if config.attack is AttackKind.IDLE:
        raise ConfigError("the closed-form moments assume a uniform Gaussian attack")
    h0 = run_trials(config, Hypothesis.H0)
    h1 = run_trials(config, Hypothesis.H1)
    rows = []
    for hyp, batch in (("h0", h0), ("h1", h1)):
        dummy = 0.0
        if config.scheme is SchemeKind.UNCORRELATED:
            dummy = config.dummy_variance / batch.k_active
        stats = theoretical_moments(config.noise_variance, batch.eta, batch.beta, config.D,
                                    dummy, config.attack_power)
        mean = getattr(stats, f"mean_{hyp}")
        var = getattr(stats, f"var_{hyp}")
        rows.append(_ratio_check(config.scheme, f"mean_{hyp}", batch.statistic / mean))
        rows.append(_ratio_check(config.scheme, f"var_{hyp}", (batch.statistic - mean) ** 2 / var))
    return MomentsReport(rows, h0, h1)


# -- CSV ---------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if hasattr(x, "value"):
        return str(x.value)
    return str(x)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_roc(path, curves) -> Path:
    rows = ((c.scheme, c.delta, t, f, d)
            for c in curves for t, f, d in zip(c.threshold, c.pf, c.pd))
    return write_csv(path, ["scheme", "delta", "threshold", "pf", "pd"], rows)


def write_tradeoff(path, points) -> Path:
    rows = ((p.scheme, p.delta, p.overhead_fraction, p.target_pf, p.pd, p.pd_stderr) for p in points)
    return write_csv(path, ["scheme", "delta", "overhead_fraction", "target_pf", "pd", "pd_stderr"], rows)


def write_hist(path, hists) -> Path:
    def rows():
        for h in hists:
            for hyp, counts in (("H0", h.counts_h0), ("H1", h.counts_h1)):
                for i, c in enumerate(counts):
                    yield h.scheme, hyp, h.edges[i], h.edges[i + 1], int(c)
    return write_csv(path, ["scheme", "hypothesis", "bin_left", "bin_right", "count"], rows())


def write_moments(path, reports) -> Path:
    rows = ((r.scheme, r.moment, r.theory, r.empirical, r.stderr, r.passed)
            for rep in reports for r in rep.rows)
    return write_csv(path, ["scheme", "moment", "theory", "empirical", "stderr", "pass"], rows)


def write_trials(path, batches) -> Path:
    rows = ((b.block_index[i], b.hypothesis, b.statistic[i], b.eta[i], b.beta[i], b.k_active[i])
            for b in batches for i in range(len(b)))
    return write_csv(path, ["block_index", "hypothesis", "statistic", "eta", "beta", "k_active"], rows)
