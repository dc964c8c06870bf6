"""Node placement, fading, participation gating and the OtA power-control factor."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBlockError, ParameterError
from .numerics import as_generator, sample_complex_gaussian

# d^-4 diverges at the server, so no node is closer than this (meters).
MIN_DISTANCE = 1.0


@dataclass(frozen=True)
class Geometry:
    user_distances: np.ndarray
    attacker_distance: float
    cell_radius: float

    def __post_init__(self):
        d = np.asarray(self.user_distances, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ParameterError("user_distances must be a non-empty vector")
        if np.any(d <= 0) or np.any(d > self.cell_radius):
            raise ParameterError("user distances must lie in (0, cell_radius]")
        if not 0 < self.attacker_distance <= self.cell_radius:
            raise ParameterError("attacker distance must lie in (0, cell_radius]")
        object.__setattr__(self, "user_distances", d)

    @property
    def K(self) -> int:
        return self.user_distances.size


@dataclass(frozen=True)
class ChannelRealization:
    """Per-block channel coefficients.

    ``g`` and ``g_b`` are the small-scale factors; ``h = g * d**(-exponent/2)``
    is the amplitude gain. ``beta`` is the attacker's average power gain.
    """

    h: np.ndarray
    h_b: complex
    participation: np.ndarray
    beta: float
    g: np.ndarray | None = None
    g_b: complex | None = None

    @property
    def K_active(self) -> int:
        return int(np.count_nonzero(self.participation))

    @property
    def h_active(self) -> np.ndarray:
        return self.h[self.participation]


@dataclass(frozen=True)
class PowerBudget:
    P0: float
    per_symbol: float
    noise_variance: float

    def __post_init__(self):
        if not 0 < self.per_symbol <= self.P0 * (1 + 1e-12):
            raise ParameterError("per-symbol power must lie in (0, P0]")
        if not self.noise_variance > 0:
            raise ParameterError("noise variance must be positive")


def sample_disk_distances(n: int, radius: float, rng, min_distance: float = MIN_DISTANCE) -> np.ndarray:
    # Uniform over the annulus min_distance < d <= radius; density ~ d.
    u = 1.0 - as_generator(rng).random(n)
    return np.sqrt(min_distance**2 + u * (radius**2 - min_distance**2))


def place_nodes(K: int, radius: float, rng) -> Geometry:
    """Drop K users and one attacker uniformly over a disk around the server."""
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    if not radius > MIN_DISTANCE:
        raise ParameterError(f"radius must exceed the {MIN_DISTANCE} m distance floor")
    d = sample_disk_distances(K + 1, radius, rng)
    return Geometry(d[:K], float(d[K]), float(radius))


def apply_participation(g: np.ndarray, threshold: float) -> np.ndarray:
    """Users whose small-scale amplitude is strictly above ``threshold``."""
    if threshold < 0:
        raise ParameterError("threshold must be non-negative")
    mask = np.abs(np.asarray(g)) > threshold
    if not mask.any():
        raise InvalidBlockError("no user passed the participation gate")
    return mask


def realize_channels(geom: Geometry, rng, threshold: float = 0.0,
                     pathloss_exponent: float = 4.0) -> ChannelRealization:
    g = sample_complex_gaussian(geom.K + 1, 1.0, rng)
    amp = np.append(geom.user_distances, geom.attacker_distance) ** (-pathloss_exponent / 2)
    h = g * amp
    mask = apply_participation(g[:-1], threshold)
    return ChannelRealization(
        h=h[:-1], h_b=complex(h[-1]), participation=mask,
        beta=float(geom.attacker_distance ** -pathloss_exponent),
        g=g[:-1], g_b=complex(g[-1]),
    )


def amplitude_scaling_factor(realization: ChannelRealization, peak_amplitudes, per_symbol: float) -> float:
    """eta = sqrt(P_s) * min_k K_active |h_k| / peak_k over participating users.

    ``peak_amplitudes`` is either length K (indexed by the participation
    mask) or already restricted to the active users.
    """
    peaks = np.asarray(peak_amplitudes, dtype=float)
    mask = realization.participation
    if peaks.size == mask.size:
        peaks = peaks[mask]
    if peaks.size != realization.K_active:
        raise ParameterError("peak amplitudes do not match the participating users")
    if realization.K_active < 1:
        raise InvalidBlockError("no participating users")
    if np.any(peaks <= 0):
        raise ParameterError("peak amplitudes must be positive")
    if not per_symbol > 0:
        raise ParameterError("per-symbol power must be positive")
    k_act = realization.K_active
    return float(np.sqrt(per_symbol) * np.min(k_act * np.abs(realization.h_active) / peaks))
