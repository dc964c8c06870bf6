import math

import numpy as np
import pytest

from otadetect.attacker import AttackKind, AttackStrategy, generate_attack
from otadetect.errors import ConfigError, ParameterError
from otadetect.numerics import RngStream


def test_none_is_silent():
    b = generate_attack(AttackStrategy(AttackKind.NONE), 50, 1e-3, rng=RngStream(0))
    assert np.all(b == 0)


def test_gaussian_at_max_power():
    P0 = 1e-3
    b = generate_attack(AttackStrategy("gaussian_uniform"), 100_000, P0, rng=RngStream(1))
    p = np.abs(b) ** 2
    assert abs(p.mean() - P0) < 3 * p.std() / math.sqrt(p.size)


def test_gaussian_energy_uniform_over_positions():
    rng = RngStream(2)
    B = np.array([generate_attack(AttackStrategy(), 5, 1.0, rng=rng) for _ in range(20_000)])
    p = np.abs(B) ** 2
    se = p.std(axis=0) / math.sqrt(p.shape[0])
    assert np.all(np.abs(p.mean(axis=0) - 1.0) < 3 * se)


def test_idle_zero_on_dummies():
    idx = np.array([1, 4, 7])
    b = generate_attack(AttackStrategy("idle"), 10, 1.0, oracle_dummy_indices=idx, rng=RngStream(3))
    assert np.all(b[idx] == 0)
    assert np.all(np.delete(b, idx) != 0)


def test_idle_needs_oracle():
    with pytest.raises(ConfigError):
        generate_attack(AttackStrategy(AttackKind.IDLE), 10, 1.0, rng=RngStream(4))


def test_scaled_power():
    s = AttackStrategy("scaled", 0.1)
    b = generate_attack(s, 100_000, 2.0, rng=RngStream(5))
    p = np.abs(b) ** 2
    assert abs(p.mean() - 0.2) < 3 * p.std() / math.sqrt(p.size)


def test_strategy_validation():
    with pytest.raises(ConfigError):
        AttackStrategy("scaled", 1.0)
    with pytest.raises(ConfigError):
        AttackStrategy("gaussian", -1.0)
    with pytest.raises(ValueError):
        AttackStrategy("teleport")


def test_length_validated():
    with pytest.raises(ParameterError):
        generate_attack(AttackStrategy(), 0, 1.0, rng=RngStream(6))
