import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from otadetect import cli
from otadetect import experiments as ex
from otadetect.config import SystemConfig, load_config
from otadetect.detector import Hypothesis
from otadetect.errors import ConfigError, ParameterError
from otadetect.trials import run_trials

SMALL = SystemConfig(K=8, L=40, delta=0.1, trials=4000, seed=4)


# -- ROC ---------------------------------------------------------------------

def test_roc_staircase_example():
    thr, pf, pd, auc = ex.roc_from_statistics([1.0, 2.0], [3.0, 4.0])
    assert (pf[0], pd[0]) == (0, 0) and (pf[-1], pd[-1]) == (1, 1)
    assert auc == 1.0
    assert ex.roc_from_statistics([3.0, 4.0], [1.0, 2.0])[3] == 0.0


@given(s0=st.lists(st.floats(0, 100), min_size=1, max_size=60),
       s1=st.lists(st.floats(0, 100), min_size=1, max_size=60))
def test_roc_valid(s0, s1):
    thr, pf, pd, auc = ex.roc_from_statistics(s0, s1)
    assert (pf[0], pd[0]) == (0, 0) and (pf[-1], pd[-1]) == (1, 1)
    assert np.all(np.diff(thr) < 0)
    assert np.all(np.diff(pf) >= 0) and np.all(np.diff(pd) >= 0)
    assert 0 <= auc <= 1


@given(s=st.lists(st.floats(0, 100), min_size=1, max_size=60))
def test_roc_auc_matches_mann_whitney(s):
    s0 = np.array(s)
    s1 = s0[::-1] + 0.5
    auc = ex.roc_from_statistics(s0, s1)[3]
    gt = (s1[:, None] > s0[None, :]).mean() + 0.5 * (s1[:, None] == s0[None, :]).mean()
    assert auc == pytest.approx(gt, abs=1e-12)


def test_roc_needs_trials():
    with pytest.raises(ConfigError):
        ex.roc_curve(SMALL.replace(trials=999))


def test_roc_attack_none_is_diagonal():
    c = ex.roc_curve(SMALL.replace(attack="none", trials=20_000))
    n = len(c.h1)
    band = 3 * np.sqrt(np.maximum(c.pf * (1 - c.pf), 1 / n) * 2 / n)
    assert np.all(np.abs(c.pd - c.pf) <= band + 1e-12)
    assert abs(c.auc - 0.5) < 0.02


@pytest.mark.parametrize("scheme", ["correlated", "uncorrelated"])
def test_roc_dominance(scheme):
    c = ex.roc_curve(SystemConfig(trials=20_000, seed=1, scheme=scheme))
    n = len(c.h1)
    assert np.all(c.pd >= c.pf - 3 * np.sqrt(2 * np.maximum(c.pf * (1 - c.pf), 1 / n) / n))
    assert c.points[0].pf == 0 and c.points[-1].pd == 1


# -- trade-off -----------------------------------------------------------------

def test_tradeoff_overhead_is_d_over_l():
    pts = ex.tradeoff_curve(SystemConfig(trials=2000), [0.005, 0.02, 1.0])
    assert [p.D for p in pts] == [5, 20, 1000]
    assert [p.overhead_fraction for p in pts] == [0.005, 0.02, 1.0]


def test_tradeoff_full_overhead_detects():
    (p,) = ex.tradeoff_curve(SystemConfig(trials=5000), [1.0])
    assert p.pd > 0.99


def test_detection_probability_calibrations_agree():
    cfg = SystemConfig(trials=20_000, seed=6, scheme="uncorrelated")
    h0, h1 = run_trials(cfg, "H0"), run_trials(cfg, "H1")
    pa, se = ex.detection_probability(cfg, h1)
    pe, _ = ex.detection_probability(cfg.replace(calibration="empirical"), h1, h0)
    assert abs(pa - pe) < 4 * se + 0.01


def test_empirical_calibration_needs_h0():
    cfg = SMALL.replace(calibration="empirical")
    with pytest.raises(ParameterError):
        ex.detection_probability(cfg, run_trials(cfg, "H1", 10))


# -- histograms ----------------------------------------------------------------

def test_overlap_coefficient_examples():
    assert ex.overlap_coefficient([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert ex.overlap_coefficient([5, 0], [0, 5]) == 0.0
    assert ex.overlap_coefficient([1, 1], [2, 0]) == pytest.approx(0.5)


def test_histogram_bins_and_h0_mean():
    (h,) = ex.histogram_export(SystemConfig(trials=10_000, hist_bins=40), ["correlated"])
    assert h.edges.size == 41 and np.all(np.diff(np.log10(h.edges)) > 0)
    assert np.allclose(np.diff(np.log10(h.edges)), np.diff(np.log10(h.edges))[0])
    assert h.counts_h0.sum() == h.counts_h1.sum() == 10_000
    s = h.h0.statistic
    ref = h.h0.sigma_tilde2 * SystemConfig().D
    ratio = s / ref
    assert abs(ratio.mean() - 1) < 3 * ratio.std() / math.sqrt(ratio.size)


def test_histogram_needs_trials():
    with pytest.raises(ConfigError):
        ex.histogram_export(SystemConfig(trials=9_999))


# -- moments -----------------------------------------------------------------

def test_moments_beta_degenerate():
    rep = ex.validate_moments(SystemConfig(trials=20_000, attack="none"))
    assert rep.passed
    assert np.array_equal(rep.h0.statistic.size, rep.h1.statistic.size)


def test_moments_reject_idle():
    with pytest.raises(ConfigError):
        ex.validate_moments(SystemConfig(attack="idle", trials=100))


# -- config ------------------------------------------------------------------

def test_config_defaults():
    c = SystemConfig()
    assert (c.K, c.L, c.D, c.P0, c.radius) == (100, 1000, 10, 1e-3, 100.0)
    assert c.noise_variance == pytest.approx(1e-14)


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("K: 10\nL: 200\ndelta: 0.05\nscheme: uncorrelated\nattack: gaussian_uniform\n")
    c = load_config(p, trials=123)
    assert (c.K, c.L, c.D, c.trials) == (10, 200, 10, 123)
    assert c.scheme.value == "uncorrelated"


@pytest.mark.parametrize("text", ["bogus: 1\n", "K: 1.5\n", "delta: 0.0001\n", "- 1\n- 2\n", "K: [\n"])
def test_config_errors(tmp_path, text):
    p = tmp_path / "bad.yaml"
    p.write_text(text)
    with pytest.raises(ConfigError):
        load_config(p)


def test_config_rejects_bad_values():
    for kw in (dict(P0=0), dict(target_pf=1.0), dict(scheme="nope"), dict(attack="scaled", power_scale=2)):
        with pytest.raises(ConfigError):
            SystemConfig(**kw)


# -- CSV + CLI ---------------------------------------------------------------

def _run_cli(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def test_cli_roc_headers_and_line_endings(tmp_path):
    assert _run_cli(tmp_path, "roc", "--trials", "2000", "--delta", "0.01,0.1") == 0
    raw = (tmp_path / "roc.csv").read_bytes()
    assert raw.startswith(b"scheme,delta,threshold,pf,pd\n") and b"\r" not in raw
    schemes = {line.split(b",")[0] for line in raw.splitlines()[1:]}
    assert schemes == {b"correlated", b"uncorrelated"}


@pytest.mark.parametrize("command,name,header", [
    ("tradeoff", "tradeoff.csv", "scheme,delta,overhead_fraction,target_pf,pd,pd_stderr"),
    ("hist", "hist.csv", "scheme,hypothesis,bin_left,bin_right,count"),
    ("validate-moments", "moments.csv", "scheme,moment,theory,empirical,stderr,pass"),
])
def test_cli_outputs(tmp_path, command, name, header):
    code = _run_cli(tmp_path, command, "--trials", "10000", "--delta", "0.01", "--dump-trials")
    assert code == 0
    assert (tmp_path / name).read_text().splitlines()[0] == header
    dumps = sorted(tmp_path.glob("trials*.csv"))
    assert dumps and dumps[0].read_text().startswith("block_index,hypothesis,statistic,eta,beta,k_active\n")


def test_cli_byte_identical_reruns(tmp_path):
    for sub in ("a", "b"):
        assert _run_cli(tmp_path / sub, "roc", "--trials", "3000", "--seed", "99", "--dump-trials") == 0
        assert _run_cli(tmp_path / sub, "tradeoff", "--trials", "2000", "--seed", "99",
                        "--delta", "0.01,0.05") == 0
    for name in ("roc.csv", "tradeoff.csv", "trials_correlated_0.01.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    other = tmp_path / "c"
    assert _run_cli(other, "roc", "--trials", "3000", "--seed", "100") == 0
    assert (other / "roc.csv").read_bytes() != (tmp_path / "a" / "roc.csv").read_bytes()


def test_cli_exit_code_config_error(tmp_path, capsys):
    assert _run_cli(tmp_path, "roc", "--trials", "10") == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("nonsense_key: 1\n")
    assert _run_cli(tmp_path, "hist", "--config", str(bad)) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["roc", "--scheme", "diagonal"])
    assert exc.value.code == 2


def test_cli_exit_code_validation_failure(tmp_path, monkeypatch):
    failing = ex.MomentsReport([ex.MomentCheck(ex.SCHEMES[0], "mean_h0", 1.0, 2.0, 0.1)])
    monkeypatch.setattr(ex, "validate_moments", lambda cfg: failing)
    assert _run_cli(tmp_path, "validate-moments", "--trials", "10") == 3
    assert "false" in (tmp_path / "moments.csv").read_text()


def test_cli_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("K: 8\nL: 40\ndelta: 0.1\ntrials: 2000\nscheme: uncorrelated\n")
    assert _run_cli(tmp_path, "validate-moments", "--config", str(cfg), "--trials", "4000") == 0
    rows = (tmp_path / "moments.csv").read_text().splitlines()[1:]
    assert len(rows) == 4 and all(r.startswith("uncorrelated,") for r in rows)


def test_write_trials_roundtrip(tmp_path):
    b = run_trials(SMALL, Hypothesis.H1, 7)
    path = ex.write_trials(tmp_path / "t.csv", [b])
    lines = path.read_text().splitlines()
    assert len(lines) == 8
    first = lines[1].split(",")
    assert first[1] == "H1" and float(first[2]) == b.statistic[0]
