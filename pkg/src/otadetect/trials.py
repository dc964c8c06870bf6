"""Single-block Monte Carlo trials.

Two engines produce the detection statistic of one block:

``full``
    Runs the literal pipeline: draws every user's data, builds the composite
    block (including the (L+D)x(L+D) Haar unitary), precodes, superposes and
    extracts. Exact, but a 1010x1010 Haar draw costs ~0.4 s.

``fast``
    Samples only the quantities the detection vector depends on, using
    distributional identities that hold for Gaussian data, dummies, noise and
    attacks. Per-user peak amplitudes (which set eta) are drawn from their
    exact marginal law; in the correlated scheme the O(1/(L+D)) dependence of
    peaks across users through the common rotation is not reproduced. The
    normalized correlated statistic does not depend on eta at all.
    Blocks are simulated in vectorized chunks of ``CHUNK`` consecutive
    indices, each chunk with its own streams keyed by
    ``(seed, stream, chunk, hypothesis)``.

The full engine keys its streams by ``(seed, stream, block_index,
hypothesis, redraw)``. Either way a block's outcome depends only on the
config and the block index, never on scheduling.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache, partial

import numpy as np

from . import numerics as nx
from .attacker import AttackKind, AttackStrategy, generate_attack
from .channel import amplitude_scaling_factor, place_nodes, realize_channels, sample_disk_distances
from .config import SystemConfig
from .detector import Hypothesis, energy_statistic
from .dummy_schemes import (SchemeKind, build_correlated, build_uncorrelated,
                            effective_noise_variance, extract_detection_vector)
from .errors import InvalidBlockError
from .ota_core import TransmitBlock, precode_block, receive

log = logging.getLogger(__name__)

MAX_REDRAWS = 1000
# blocks per vectorized chunk of the fast engine; part of the seeding contract
CHUNK = 1024


@dataclass(frozen=True)
class TrialRecord:
    block_index: int
    hypothesis: Hypothesis
    statistic: float
    eta: float
    beta: float
    K_active: int
    sigma_tilde2: float
    hb2: float
    redraws: int = 0
    comm_mse: float = float("nan")

    @property
    def normalized(self) -> float:
        return self.statistic / self.sigma_tilde2


@dataclass
class TrialBatch:
    """Column-oriented records of many trials of one hypothesis."""

    hypothesis: Hypothesis
    block_index: np.ndarray
    statistic: np.ndarray
    eta: np.ndarray
    beta: np.ndarray
    k_active: np.ndarray
    sigma_tilde2: np.ndarray
    hb2: np.ndarray
    redraws: np.ndarray
    comm_mse: np.ndarray

    @classmethod
    def from_records(cls, hypothesis: Hypothesis, records) -> "TrialBatch":
        records = list(records)

        def col(name, dtype=float):
            return np.array([getattr(r, name) for r in records], dtype=dtype)

        return cls(hypothesis, col("block_index", int), col("statistic"), col("eta"), col("beta"),
                   col("K_active", int), col("sigma_tilde2"), col("hb2"), col("redraws", int),
                   col("comm_mse"))

    def __len__(self) -> int:
        return self.statistic.size

    @property
    def normalized(self) -> np.ndarray:
        """Statistic in units of the per-trial effective noise; Erlang(D, 1) under H0."""
        return self.statistic / self.sigma_tilde2

    def records(self):
        for i in range(len(self)):
            yield TrialRecord(int(self.block_index[i]), self.hypothesis, float(self.statistic[i]),
                              float(self.eta[i]), float(self.beta[i]), int(self.k_active[i]),
                              float(self.sigma_tilde2[i]), float(self.hb2[i]), int(self.redraws[i]),
                              float(self.comm_mse[i]))


def _streams(config: SystemConfig, hyp: Hypothesis, block_index: int, redraw: int):
    key = (block_index, hyp.code, redraw)
    return {sid: nx.RngStream(config.seed, sid, key)
            for sid in (nx.SHARED_SECRET, nx.CHANNEL, nx.DATA, nx.NOISE, nx.ATTACK)}


def _max_exponential(gen: np.random.Generator, m: int, size) -> np.ndarray:
    # Inverse CDF of the maximum of m i.i.d. Exp(1): F(x) = (1 - e^-x)^m.
    u = np.maximum(gen.random(size), np.finfo(float).tiny)
    return -np.log(-np.expm1(np.log(u) / m))


def _attack_strategy(config: SystemConfig, hyp: Hypothesis) -> AttackStrategy:
    if hyp is Hypothesis.H0:
        return AttackStrategy(AttackKind.NONE, 0.0)
    return config.strategy


def batch_eta(h: np.ndarray, mask: np.ndarray, peaks: np.ndarray, per_symbol: float) -> np.ndarray:
    """Row-wise :func:`amplitude_scaling_factor` for (trials, K) arrays."""
    k_act = mask.sum(axis=1, keepdims=True)
    ratio = np.where(mask, k_act * np.abs(h) / peaks, np.inf)
    return np.sqrt(per_symbol) * ratio.min(axis=1)


def _draw_nodes(config: SystemConfig, rng, size: int):
    K = config.K
    d = sample_disk_distances((size, K + 1), config.radius, rng)
    g = nx.sample_complex_gaussian((size, K + 1), 1.0, rng)
    return d, g, np.abs(g[:, :K]) > config.fading_threshold


@lru_cache(maxsize=16)
def _fast_chunk(config: SystemConfig, hyp: Hypothesis, chunk: int) -> dict:
    """Vectorized reduced sampler for blocks ``chunk*CHUNK .. (chunk+1)*CHUNK - 1``."""
    N, K, L, D, n = CHUNK, config.K, config.L, config.D, config.n
    var_x, var_d = config.data_variance, config.dummy_variance
    stream = partial(nx.RngStream, config.seed, key=(chunk, hyp.code))

    d, g, mask = _draw_nodes(config, stream(nx.CHANNEL), N)
    redraws = np.zeros(N, dtype=int)
    bad = ~mask.any(axis=1)
    while bad.any():
        r = redraws.max() + 1
        if r > MAX_REDRAWS:
            raise InvalidBlockError(f"no participants after {MAX_REDRAWS} redraws")
        rng = nx.RngStream(config.seed, nx.CHANNEL, (chunk, hyp.code, int(r)))
        d[bad], g[bad], mask[bad] = _draw_nodes(config, rng, int(bad.sum()))
        redraws[bad] = r
        bad = ~mask.any(axis=1)
    if redraws.any():
        log.debug("chunk %d (%s): %d block(s) redrawn", chunk, hyp.value, int(np.count_nonzero(redraws)))

    h_all = g * d ** (-config.pathloss_exponent / 2)
    h, h_b = h_all[:, :K], h_all[:, K]
    beta = d[:, K] ** -config.pathloss_exponent
    k_act = mask.sum(axis=1)

    # peak^2 of each user's transmitted composite vector
    gen_d = stream(nx.DATA).gen
    if config.scheme is SchemeKind.UNCORRELATED:
        peak2 = np.maximum(var_x * _max_exponential(gen_d, L, (N, K)),
                           var_d * _max_exponential(gen_d, D, (N, K)))
    else:
        # U x_k with L Gaussian entries is distributed as sqrt(Beta(L, D)) times
        # a CN(0, I_{L+D}) vector; cross-user dependence via U is not kept.
        peak2 = var_x * gen_d.beta(L, D, (N, K)) * _max_exponential(gen_d, n, (N, K))
    eta = batch_eta(h, mask, np.sqrt(peak2), config.per_symbol_power)

    y_d = nx.sample_complex_gaussian((N, D), 1.0, stream(nx.NOISE)) * (
        np.sqrt(config.noise_variance) / eta)[:, None]
    if config.scheme is SchemeKind.UNCORRELATED:
        # mean of K_active independent CN(0, var_d) dummies
        y_d += nx.sample_complex_gaussian((N, D), 1.0, gen_d) * np.sqrt(var_d / k_act)[:, None]

    strategy = _attack_strategy(config, hyp)
    power = strategy.symbol_power(config.P0)
    if power > 0:
        gen_a = stream(nx.ATTACK).gen
        if strategy.variant is AttackKind.IDLE:
            if config.scheme is SchemeKind.CORRELATED:
                # U_D^H b with b silent on D positions: ||b|| times D coordinates
                # of a uniform unit vector in C^(L+D).
                b_norm2 = power * gen_a.gamma(L, size=N)
                w = nx.sample_complex_gaussian((N, D), 1.0, gen_a)
                w_norm2 = np.sum(np.abs(w) ** 2, axis=1) + gen_a.gamma(L, size=N)
                proj = np.sqrt(b_norm2 / w_norm2)[:, None] * w
            else:
                proj = None
        else:
            proj = nx.sample_complex_gaussian((N, D), power, gen_a)
        if proj is not None:
            y_d += (h_b / eta)[:, None] * proj

    s2 = config.noise_variance / eta**2
    if config.scheme is SchemeKind.UNCORRELATED:
        s2 = s2 + var_d / k_act
    stat = np.sum(y_d.real**2 + y_d.imag**2, axis=1)
    return dict(statistic=stat, eta=eta, beta=beta, k_active=k_act, sigma_tilde2=s2,
                hb2=np.abs(h_b) ** 2, redraws=redraws)


def _full_detection(config: SystemConfig, hyp: Hypothesis, s, realization):
    L, D = config.L, config.D
    data = nx.sample_complex_gaussian((L, config.K), config.data_variance, s[nx.DATA])
    if config.scheme is SchemeKind.UNCORRELATED:
        block = build_uncorrelated(data, D, config.dummy_variance, s[nx.SHARED_SECRET], s[nx.DATA])
    else:
        block = build_correlated(data, D, s[nx.SHARED_SECRET])
    active = realization.participation
    tx = block.transmit_data()
    peaks = np.max(np.abs(tx[:, active]), axis=0)
    eta = amplitude_scaling_factor(realization, peaks, config.per_symbol_power)
    signals = precode_block(tx, realization, eta)
    b = generate_attack(_attack_strategy(config, hyp), block.length, config.P0,
                        oracle_dummy_indices=block.dummy_indices, rng=s[nx.ATTACK])
    received = receive(TransmitBlock(signals, b), realization, eta, config.noise_variance, s[nx.NOISE])
    dv = extract_detection_vector(received, block, realization.K_active, eta, config.noise_variance)
    target = data[:, active].mean(axis=1)
    comm_mse = float(np.mean(np.abs(dv.y_comm - target) ** 2))
    return dv.y_d, eta, dv.effective_noise_variance, comm_mse


def run_trial(config: SystemConfig, hypothesis, block_index: int) -> TrialRecord:
    """One block under ``hypothesis``; deterministic in (seed, block_index, hypothesis).

    A block where nobody passes the participation gate is redrawn from the
    next substream.
    """
    hyp = Hypothesis(hypothesis)
    if config.engine == "fast":
        chunk, row = divmod(block_index, CHUNK)
        c = _fast_chunk(config, hyp, chunk)
        return TrialRecord(block_index, hyp, float(c["statistic"][row]), float(c["eta"][row]),
                           float(c["beta"][row]), int(c["k_active"][row]), float(c["sigma_tilde2"][row]),
                           float(c["hb2"][row]), int(c["redraws"][row]))
    for redraw in range(MAX_REDRAWS):
        s = _streams(config, hyp, block_index, redraw)
        geom = place_nodes(config.K, config.radius, s[nx.CHANNEL])
        try:
            realization = realize_channels(geom, s[nx.CHANNEL], config.fading_threshold,
                                           config.pathloss_exponent)
        except InvalidBlockError:
            log.debug("block %d (%s): no participants, redraw %d", block_index, hyp.value, redraw + 1)
            continue
        y_d, eta, s2, mse = _full_detection(config, hyp, s, realization)
        return TrialRecord(block_index, hyp, energy_statistic(y_d), eta, realization.beta,
                           realization.K_active, s2, abs(realization.h_b) ** 2, redraw, mse)
    raise InvalidBlockError(f"block {block_index}: no participants after {MAX_REDRAWS} redraws")


def _run_full_range(args):
    config, hyp, start, stop = args
    return [run_trial(config, hyp, i) for i in range(start, stop)]


def _run_fast_chunk(args):
    config, hyp, chunk = args
    return _fast_chunk(config, hyp, chunk)


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def run_trials(config: SystemConfig, hypothesis, n: int | None = None, start: int = 0,
               workers: int | None = None) -> TrialBatch:
    """Run blocks ``start .. start+n-1``; the result does not depend on ``workers``."""
    hyp = Hypothesis(hypothesis)
    n = config.trials if n is None else n
    workers = config.workers if workers is None else workers
    stop = start + n
    if config.engine == "fast":
        first, last = start // CHUNK, (stop - 1) // CHUNK
        parts = _map(_run_fast_chunk, [(config, hyp, c) for c in range(first, last + 1)], workers)
        cols = {k: np.concatenate([p[k] for p in parts])[start - first * CHUNK: stop - first * CHUNK]
                for k in parts[0]}
        batch = TrialBatch(hyp, np.arange(start, stop), comm_mse=np.full(n, np.nan), **cols)
    else:
        edges = np.linspace(start, stop, 4 * workers + 1).astype(int)
        jobs = [(config, hyp, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        records = [r for part in _map(_run_full_range, jobs, workers) for r in part]
        batch = TrialBatch.from_records(hyp, records)
    if batch.redraws.any():
        log.info("%s: %d block(s) redrawn for lack of participants", hyp.value,
                 int(np.count_nonzero(batch.redraws)))
    return batch
