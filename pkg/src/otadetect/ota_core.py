"""Pre-processing, multiple-access superposition and post-processing for OtA averaging."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import ParameterError
from .numerics import sample_complex_gaussian


@dataclass(frozen=True)
class TransmitBlock:
    """Precoded user signals, one column per *participating* user, plus the attack."""

    signals: np.ndarray
    attacker_signal: np.ndarray


@dataclass(frozen=True)
class ReceivedBlock:
    y_raw: np.ndarray
    y: np.ndarray
    eta: float


def precode(x_k, h_k: complex, eta: float, K_active: int) -> np.ndarray:
    """Channel inversion with common scaling: x_k * eta / (K_active * h_k)."""
    if h_k == 0:
        raise ParameterError("cannot invert a zero channel")
    if not eta > 0:
        raise ParameterError("eta must be positive")
    return np.asarray(x_k, dtype=complex) * (eta / (K_active * h_k))


def precode_block(X: np.ndarray, realization: ChannelRealization, eta: float) -> np.ndarray:
    """Precode the columns of X belonging to participating users."""
    h = realization.h_active
    if np.any(h == 0):
        raise ParameterError("cannot invert a zero channel")
    if not eta > 0:
        raise ParameterError("eta must be positive")
    return X[:, realization.participation] * (eta / (realization.K_active * h))


def superpose(block: TransmitBlock, realization: ChannelRealization, noise_variance: float, rng) -> np.ndarray:
    """Raw received vector: sum_k h_k s_k + h_b b + z with z ~ CN(0, noise_variance I)."""
    if not noise_variance > 0:
        raise ParameterError("noise variance must be positive")
    S = np.asarray(block.signals)
    b = np.asarray(block.attacker_signal)
    if S.ndim != 2 or S.shape[1] != realization.K_active:
        raise ParameterError("signal matrix must have one column per participating user")
    if b.shape != (S.shape[0],):
        raise ParameterError("attacker signal length does not match the block length")
    z = sample_complex_gaussian(S.shape[0], noise_variance, rng)
    return S @ realization.h_active + realization.h_b * b + z


def postprocess(y_raw, eta: float) -> np.ndarray:
    if not eta > 0:
        raise ParameterError("eta must be positive")
    return np.asarray(y_raw) / eta


def receive(block: TransmitBlock, realization: ChannelRealization, eta: float,
            noise_variance: float, rng) -> ReceivedBlock:
    y_raw = superpose(block, realization, noise_variance, rng)
    return ReceivedBlock(y_raw=y_raw, y=postprocess(y_raw, eta), eta=eta)
