"""Scenario configuration shared by the trial engines and the CLI."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import yaml

from .attacker import AttackKind, AttackStrategy
from .dummy_schemes import SchemeKind
from .errors import ConfigError

ENGINES = ("fast", "full")
CALIBRATIONS = ("analytic", "empirical")


def dbm_to_watts(dbm: float) -> float:
    return 10 ** ((dbm - 30) / 10)


@dataclass(frozen=True)
class SystemConfig:
    K: int = 100
    L: int = 1000
    delta: float = 0.01
    P0: float = 1e-3
    noise_dbm: float = -110.0
    radius: float = 100.0
    fading_threshold: float = 0.2
    pathloss_exponent: float = 4.0
    scheme: SchemeKind = SchemeKind.CORRELATED
    attack: AttackKind = AttackKind.GAUSSIAN
    power_scale: float = 1.0
    trials: int = 100_000
    seed: int = 0
    target_pf: float = 0.01
    legit_power_factor: float = 1.0
    # variance of the authentic symbols; dummies default to the same value
    data_variance: float = 1.0
    sigma_d2: float | None = None
    engine: str = "fast"
    calibration: str = "analytic"
    hist_bins: int = 100
    workers: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "scheme", SchemeKind(self.scheme))
            object.__setattr__(self, "attack", AttackKind.parse(self.attack))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        checks = {
            "K": self.K >= 1, "L": self.L >= 1, "delta": self.delta >= 0,
            "P0": self.P0 > 0, "radius": self.radius > 1, "fading_threshold": self.fading_threshold >= 0,
            "pathloss_exponent": self.pathloss_exponent > 0, "trials": self.trials >= 1,
            "seed": 0 <= self.seed < 2**64, "target_pf": 0 < self.target_pf < 1,
            "legit_power_factor": self.legit_power_factor > 0, "data_variance": self.data_variance > 0,
            "sigma_d2": self.sigma_d2 is None or self.sigma_d2 > 0,
            "engine": self.engine in ENGINES, "calibration": self.calibration in CALIBRATIONS,
            "hist_bins": self.hist_bins >= 2, "workers": self.workers >= 1,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise ConfigError(f"invalid config value(s): {', '.join(bad)}")
        if self.D < 1:
            raise ConfigError(f"delta={self.delta} gives D={self.D}; detection needs D >= 1")
        self.strategy  # validates attack/power_scale

    @property
    def D(self) -> int:
        return int(round(self.delta * self.L))

    @property
    def n(self) -> int:
        return self.L + self.D

    @property
    def noise_variance(self) -> float:
        return dbm_to_watts(self.noise_dbm)

    @property
    def dummy_variance(self) -> float:
        return self.data_variance if self.sigma_d2 is None else self.sigma_d2

    @property
    def legit_budget(self) -> float:
        return self.P0 * self.legit_power_factor

    @property
    def per_symbol_power(self) -> float:
        """Legitimate per-symbol power after the dummy overhead (uncorrelated only)."""
        if self.scheme is SchemeKind.UNCORRELATED:
            return self.legit_budget * self.L / (self.L + self.D)
        return self.legit_budget

    @property
    def strategy(self) -> AttackStrategy:
        try:
            return AttackStrategy(self.attack, self.power_scale)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def attack_power(self) -> float:
        return self.strategy.symbol_power(self.P0)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)


FIELD_NAMES = {f.name for f in dataclasses.fields(SystemConfig)}
_INT_FIELDS = {"K", "L", "trials", "seed", "hist_bins", "workers"}
_FLOAT_FIELDS = {"delta", "P0", "noise_dbm", "radius", "fading_threshold", "pathloss_exponent",
                 "power_scale", "target_pf", "legit_power_factor", "data_variance", "sigma_d2"}


def load_config(path, **overrides) -> SystemConfig:
    """Read a flat ``key: value`` file whose keys are SystemConfig field names."""
    values = {}
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must be a flat key-value mapping")
        values.update(data)
    values.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(values) - FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    try:
        for key, value in values.items():
            if key in _INT_FIELDS:
                as_float = float(value)
                if as_float != int(as_float):
                    raise ConfigError(f"{key} must be an integer, got {value!r}")
                values[key] = int(as_float)
            elif key in _FLOAT_FIELDS and value is not None:
                values[key] = float(value)
        return SystemConfig(**values)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
