"""Composite blocks for the two dummy-sample designs, and server-side extraction.

Indices are 0-based throughout. Dummy positions are drawn from the shared
secret stream so that every user and the server agree on them.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterError
from .numerics import as_generator, sample_complex_gaussian, sample_haar_unitary
from .ota_core import ReceivedBlock


class SchemeKind(str, Enum):
    UNCORRELATED = "uncorrelated"
    CORRELATED = "correlated"


@dataclass(frozen=True)
class CompositeBlock:
    """Composite data of one block, before any rotation.

    ``X`` is (L+D) x K. For the correlated scheme ``U`` holds the shared
    unitary and the rows of ``X`` at ``dummy_indices`` are zero.
    ``energy_factor`` is the per-symbol power relative to a dummy-free block.
    """

    X: np.ndarray
    dummy_indices: np.ndarray
    scheme: SchemeKind
    U: np.ndarray | None = None
    sigma_d2: float = 0.0

    def __post_init__(self):
        n = self.X.shape[0]
        idx = self.dummy_indices
        if np.unique(idx).size != idx.size or np.any(idx < 0) or np.any(idx >= n):
            raise ParameterError("dummy indices must be distinct and within the block")
        if self.scheme is SchemeKind.CORRELATED:
            if self.U is None or self.U.shape != (n, n):
                raise ParameterError("correlated block needs an (L+D)x(L+D) unitary")
            if self.sigma_d2 != 0:
                raise ParameterError("correlated block carries zero-valued dummies")
        elif self.U is not None:
            raise ParameterError("uncorrelated block has no unitary")

    @property
    def D(self) -> int:
        return int(self.dummy_indices.size)

    @property
    def L(self) -> int:
        return self.X.shape[0] - self.D

    @property
    def length(self) -> int:
        return self.X.shape[0]

    @property
    def energy_factor(self) -> float:
        if self.scheme is SchemeKind.CORRELATED:
            return 1.0
        return self.L / (self.L + self.D)

    @property
    def comm_indices(self) -> np.ndarray:
        mask = np.ones(self.length, dtype=bool)
        mask[self.dummy_indices] = False
        return np.flatnonzero(mask)

    def transmit_data(self) -> np.ndarray:
        """The composite vectors as put on the air (U X for the correlated scheme)."""
        if self.U is None:
            return self.X
        return self.U @ self.X


@dataclass(frozen=True)
class DetectionVector:
    y_d: np.ndarray
    effective_noise_variance: float
    y_comm: np.ndarray | None = None


def draw_dummy_indices(L: int, D: int, shared_rng) -> np.ndarray:
    """D distinct positions out of L+D, uniform over D-subsets, sorted."""
    if L < 1 or D < 1:
        raise ParameterError(f"need L >= 1 and D >= 1, got L={L}, D={D}")
    idx = as_generator(shared_rng).choice(L + D, size=D, replace=False)
    return np.sort(idx)


def _interleave(real_data: np.ndarray, dummy_indices: np.ndarray, dummies: np.ndarray | None) -> np.ndarray:
    L, K = real_data.shape
    D = dummy_indices.size
    X = np.zeros((L + D, K), dtype=complex)
    mask = np.ones(L + D, dtype=bool)
    mask[dummy_indices] = False
    X[mask] = real_data
    if dummies is not None:
        X[dummy_indices] = dummies
    return X


def build_uncorrelated(real_data, D: int, sigma_d2: float, shared_rng, data_rng) -> CompositeBlock:
    """Interleave independent CN(0, sigma_d2) dummies at shared secret positions."""
    real_data = np.atleast_2d(np.asarray(real_data, dtype=complex))
    if D < 0:
        raise ParameterError("D must be non-negative")
    if D == 0:
        return CompositeBlock(real_data.copy(), np.empty(0, dtype=int), SchemeKind.UNCORRELATED,
                              sigma_d2=float(sigma_d2))
    if not sigma_d2 > 0:
        raise ParameterError("dummy variance must be positive")
    L, K = real_data.shape
    idx = draw_dummy_indices(L, D, shared_rng)
    dummies = sample_complex_gaussian((D, K), sigma_d2, data_rng)
    return CompositeBlock(_interleave(real_data, idx, dummies), idx, SchemeKind.UNCORRELATED,
                          sigma_d2=float(sigma_d2))


def build_correlated(real_data, D: int, shared_rng) -> CompositeBlock:
    """Zero dummies, then hide the block behind a shared Haar unitary."""
    real_data = np.atleast_2d(np.asarray(real_data, dtype=complex))
    if D < 1:
        raise ParameterError("correlated design needs D >= 1")
    L, _ = real_data.shape
    idx = draw_dummy_indices(L, D, shared_rng)
    U = sample_haar_unitary(L + D, shared_rng)
    return CompositeBlock(_interleave(real_data, idx, None), idx, SchemeKind.CORRELATED, U=U)


def effective_noise_variance(scheme: SchemeKind, noise_variance: float, eta: float,
                             sigma_d2: float, K_active: int) -> float:
    s = noise_variance / eta**2
    if SchemeKind(scheme) is SchemeKind.UNCORRELATED:
        s += sigma_d2 / K_active
    return s


def extract_detection_vector(received: ReceivedBlock, block: CompositeBlock, K_active: int,
                             eta: float, noise_variance: float) -> DetectionVector:
    """Pull the detection-phase vector (and the communication estimate) out of a block.

    For the correlated scheme the raw vector is rotated back with U^H before
    the dummy coordinates are selected.
    """
    if received.y_raw.shape != (block.length,):
        raise ParameterError("received vector length does not match the block")
    y = received.y_raw / eta
    if block.U is not None:
        y = block.U.conj().T @ y
    return DetectionVector(
        y_d=y[block.dummy_indices],
        effective_noise_variance=effective_noise_variance(
            block.scheme, noise_variance, eta, block.sigma_d2, K_active),
        y_comm=y[block.comm_indices],
    )
