"""Seeded sampling primitives and Erlang distribution utilities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import ParameterError

# Stream ids. The shared-secret stream is the only one that users and the
# server both regenerate; the attacker never sees it.
SHARED_SECRET = 0
CHANNEL = 1
DATA = 2
NOISE = 3
ATTACK = 4


@dataclass
class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id, key)``.

    ``key`` further splits a stream, e.g. by block index and hypothesis, so
    that trial outcomes do not depend on scheduling order.
    """

    seed: int
    stream_id: int = 0
    key: tuple[int, ...] = ()
    gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.seed < 0 or self.seed >= 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.key))
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, (*self.key, *key))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id, self.key)


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.gen
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_complex_gaussian(n, variance: float, rng) -> np.ndarray:
    """Draw ``n`` i.i.d. CN(0, variance) samples.

    ``n`` may be an int or a shape tuple. Real and imaginary parts are
    independent with variance ``variance / 2`` each.
    """
    shape = (n,) if np.isscalar(n) else tuple(n)
    if any(int(s) < 1 for s in shape):
        raise ParameterError(f"sample size must be >= 1, got {n}")
    if not variance > 0 or not np.isfinite(variance):
        raise ParameterError(f"variance must be positive and finite, got {variance}")
    gen = as_generator(rng)
    z = gen.standard_normal((*shape, 2))
    z *= np.sqrt(variance / 2)
    return z.view(np.complex128)[..., 0]


def sample_haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed n x n unitary via QR of a complex Ginibre matrix.

    Column j of Q is multiplied by the phase of R[j, j]; without this the
    output of a QR routine is not Haar distributed.
    """
    if int(n) < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    z = sample_complex_gaussian((n, n), 1.0, rng)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    ph = d / np.abs(d)
    return q * ph


def erlang_tail(x, shape: int, scale: float):
    """P(S > x) for S ~ Erlang(shape, scale)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("x must be non-negative")
    if shape < 1 or int(shape) != shape:
        raise ParameterError(f"shape must be a positive integer, got {shape}")
    if not scale > 0:
        raise ParameterError(f"scale must be positive, got {scale}")
    out = special.gammaincc(shape, x / scale)
    return float(out) if out.ndim == 0 else out


def erlang_quantile(p_tail: float, shape: int, scale: float) -> float:
    """Return the threshold whose Erlang upper-tail probability is ``p_tail``.

    Solved by bracketing root search on :func:`erlang_tail`; the bracket is
    grown geometrically from the mean until it contains the root.
    """
    if not 0 < p_tail < 1:
        raise ParameterError(f"p_tail must lie in (0, 1), got {p_tail}")
    if shape < 1 or int(shape) != shape:
        raise ParameterError(f"shape must be a positive integer, got {shape}")
    if not scale > 0:
        raise ParameterError(f"scale must be positive, got {scale}")

    # Work in unit scale; Erlang is a scale family.
    def f(x):
        return special.gammaincc(shape, x) - p_tail

    hi = float(shape)
    while f(hi) > 0:
        hi *= 2.0
    lo = 0.0
    root = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return root * scale
