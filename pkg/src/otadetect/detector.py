"""Energy detector and its closed-form moments under both hypotheses."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterError
from .numerics import erlang_quantile


class Hypothesis(str, Enum):
    H0 = "H0"
    H1 = "H1"

    @property
    def code(self) -> int:
        return 0 if self is Hypothesis.H0 else 1


@dataclass(frozen=True)
class Decision:
    statistic: float
    threshold: float
    verdict: Hypothesis


@dataclass(frozen=True)
class DetectorStats:
    mean_h0: float
    var_h0: float
    mean_h1: float
    var_h1: float
    sigma_tilde2: float
    beta: float
    eta: float
    D: int
    # (E[stat|H1] - E[stat|H0]) / std(stat|H1), from D*a directly to avoid cancellation
    deflection: float


def energy_statistic(y_d) -> float:
    y_d = np.asarray(y_d)
    if y_d.size < 1:
        raise ParameterError("detection vector is empty")
    return float(np.sum(y_d.real**2 + y_d.imag**2))


def calibrate_threshold(sigma_tilde2: float, D: int, target_pf: float) -> float:
    """Threshold giving false-alarm rate ``target_pf`` when stat ~ Erlang(D, sigma_tilde2)."""
    return erlang_quantile(target_pf, D, sigma_tilde2)


def decide(statistic: float, gamma: float) -> Decision:
    if gamma < 0:
        raise ParameterError("threshold must be non-negative")
    verdict = Hypothesis.H1 if statistic > gamma else Hypothesis.H0
    return Decision(statistic, gamma, verdict)


def theoretical_moments(sigma2: float, eta: float, beta: float, D: int,
                        sigma_d2_over_K: float = 0.0, attack_power: float = 1.0) -> DetectorStats:
    """Mean and variance of ||y_d||^2 under H0 and H1 for a Gaussian attack.

    ``attack_power`` is the attacker's per-symbol power; with the unit-power
    attack it drops out. The H1 variance assumes |h_b|^2 ~ Exp(beta).
    Array arguments broadcast, giving one set of moments per element.
    """
    ok = [np.all(np.asarray(sigma2) > 0), np.all(np.asarray(eta) > 0), np.all(np.asarray(beta) >= 0),
          D >= 1, np.all(np.asarray(sigma_d2_over_K) >= 0), np.all(np.asarray(attack_power) >= 0)]
    if not all(ok):
        raise ParameterError("invalid moment parameters")
    s = sigma2 / eta**2 + sigma_d2_over_K
    a = beta * attack_power / eta**2
    return DetectorStats(
        mean_h0=D * s,
        var_h0=D * s**2,
        mean_h1=D * (s + a),
        var_h1=D * (s**2 + 2 * s * a + 2 * a**2) + D**2 * a**2,
        sigma_tilde2=s, beta=beta, eta=eta, D=int(D),
        deflection=D * a / np.sqrt(D * (s**2 + 2 * s * a + 2 * a**2) + D**2 * a**2),
    )


def deflection_coefficient(sigma2: float, beta: float, D: int) -> float:
    """Closed-form deflection for the correlated design; independent of eta."""
    if not beta > 0 or D < 1:
        raise ParameterError("need beta > 0 and D >= 1")
    r = sigma2 / beta
    return math.sqrt(1.0 / (1.0 + (r**2 + 2 * r + 2) / D))
