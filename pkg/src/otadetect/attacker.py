"""Perturbation vectors sent by the external attacker.

The attacker is blind to the detection design. The ``idle`` strategy is an
evaluation-only worst case and must be handed the dummy positions explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, ParameterError
from .numerics import sample_complex_gaussian


class AttackKind(str, Enum):
    NONE = "none"
    GAUSSIAN = "gaussian"
    IDLE = "idle"
    SCALED = "scaled"

    @classmethod
    def parse(cls, value) -> "AttackKind":
        aliases = {"gaussian_uniform": "gaussian", "idle_during_detection": "idle",
                   "scaled_power": "scaled"}
        if isinstance(value, cls):
            return value
        return cls(aliases.get(str(value), str(value)))


@dataclass(frozen=True)
class AttackStrategy:
    variant: AttackKind = AttackKind.GAUSSIAN
    power_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variant", AttackKind.parse(self.variant))
        if self.power_scale < 0:
            raise ConfigError("power_scale must be non-negative")
        if self.variant is AttackKind.SCALED and not self.power_scale < 1:
            raise ConfigError("scaled attack needs power_scale < 1")

    @property
    def needs_oracle(self) -> bool:
        return self.variant is AttackKind.IDLE

    def symbol_power(self, per_symbol_power: float) -> float:
        """Per-symbol power actually radiated (0 for the silent attacker)."""
        if self.variant is AttackKind.NONE:
            return 0.0
        return per_symbol_power * self.power_scale


def generate_attack(strategy: AttackStrategy, length: int, per_symbol_power: float,
                    oracle_dummy_indices=None, rng=None) -> np.ndarray:
    if length < 1:
        raise ParameterError("attack length must be >= 1")
    if strategy.needs_oracle and oracle_dummy_indices is None:
        raise ConfigError("idle attack requires the (oracle) dummy indices")
    power = strategy.symbol_power(per_symbol_power)
    if power == 0:
        return np.zeros(length, dtype=complex)
    b = sample_complex_gaussian(length, power, rng)
    if strategy.variant is AttackKind.IDLE:
        b[np.asarray(oracle_dummy_indices, dtype=int)] = 0
    return b
