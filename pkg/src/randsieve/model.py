"""Sampling the truncated random integer N_x and its factor count Omega_x.

Each prime p <= x is switched on independently with probability 1/p.
Randomness is keyed by (seed, chunk index) through numpy's SeedSequence, so
every chunk of trials has its own stream and results do not depend on the
order or the number of workers that execute the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceBoundError
from .primes import PrimeTable

MAX_INTEGER_FACTORS = 10**6
UNIFORMS_PER_BLOCK = 1 << 20
METHODS = ("direct", "thinning")


@dataclass(frozen=True)
class ModelParams:
    x: int
    seed: int
    trials: int
    chunk_size: int = 10_000
    method: str = "direct"

    def __post_init__(self):
        if self.x < 2:
            raise ValueError(f"x must be >= 2 (the model needs at least one prime), got {self.x}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")

    @property
    def n_chunks(self) -> int:
        return -(-self.trials // self.chunk_size)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    params: ModelParams
    omegas: np.ndarray = field(repr=False)
    provenance: dict

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleBatch):
            return NotImplemented
        return (
            self.params == other.params
            and self.provenance == other.provenance
            and np.array_equal(self.omegas, other.omegas)
        )


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Independent generator for one chunk, a pure function of (seed, chunk)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _direct_chunk(rng: np.random.Generator, q: np.ndarray, n: int) -> np.ndarray:
    # one uniform per prime per trial, compared against 1/p
    omegas = np.zeros(n, dtype=np.int64)
    width = max(1, UNIFORMS_PER_BLOCK // n)
    for start in range(0, len(q), width):
        block = q[start : start + width]
        omegas += np.count_nonzero(rng.random((n, len(block))) < block, axis=1)
    return omegas


def _dyadic_blocks(primes: np.ndarray) -> list[tuple[int, int]]:
    if len(primes) == 0:
        return []
    exps = np.floor(np.log2(primes.astype(np.float64))).astype(np.int64)
    cuts = np.flatnonzero(np.diff(exps)) + 1
    edges = np.concatenate(([0], cuts, [len(primes)]))
    return list(zip(edges[:-1].tolist(), edges[1:].tolist()))


def _thinning_chunk(
    rng: np.random.Generator, q: np.ndarray, blocks: list[tuple[int, int]], n: int
) -> np.ndarray:
    """Exact sampler whose cost grows with Omega_x rather than pi(x).

    Within a block of primes whose largest probability is q_max, candidate
    primes are reached by geometric(q_max) jumps and each candidate is kept
    with probability q/q_max. That is a Bernoulli(q_max) * Bernoulli(q/q_max)
    decomposition of each X_p, hence exact.
    """
    omegas = np.zeros(n, dtype=np.int64)
    for lo, hi in blocks:
        qb = q[lo:hi]
        qmax = float(qb[0])
        active = np.arange(n)
        pos = np.full(n, -1, dtype=np.int64)
        while active.size:
            pos = pos + rng.geometric(qmax, size=active.size)
            inside = pos < hi - lo
            active, pos = active[inside], pos[inside]
            keep = rng.random(active.size) * qmax < qb[pos]
            np.add.at(omegas, active[keep], 1)
    return omegas


def sample_omega(table: PrimeTable, params: ModelParams, threads: int | None = None) -> SampleBatch:
    """Draw ``params.trials`` independent copies of Omega_x.

    The output depends only on ``params``; ``threads`` changes wall time only.
    """
    if params.x > table.limit:
        raise ValueError(f"x={params.x} is beyond the table limit {table.limit}")
    primes = table.upto(params.x)
    q = 1.0 / primes.astype(np.float64)
    blocks = _dyadic_blocks(primes) if params.method == "thinning" else None

    def run_chunk(i: int) -> np.ndarray:
        n = min(params.chunk_size, params.trials - i * params.chunk_size)
        rng = chunk_rng(params.seed, i)
        if blocks is None:
            return _direct_chunk(rng, q, n)
        return _thinning_chunk(rng, q, blocks, n)

    workers = threads or os.cpu_count() or 1
    if workers == 1 or params.n_chunks == 1:
        parts = [run_chunk(i) for i in range(params.n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, range(params.n_chunks)))
    provenance = {
        "generator": "PCG64(SeedSequence(seed, spawn_key=(chunk,)))",
        "chunk_size": params.chunk_size,
        "n_chunks": params.n_chunks,
        "method": params.method,
    }
    return SampleBatch(params=params, omegas=np.concatenate(parts), provenance=provenance)


@dataclass(frozen=True)
class RandomInteger:
    """One realization of N_x: its switched-on primes and their product."""

    value: int
    factor_set: tuple[int, ...]

    @classmethod
    def from_draws(cls, primes, draws) -> "RandomInteger":
        chosen = tuple(int(p) for p, d in zip(primes, draws) if d)
        return cls(value=math.prod(chosen), factor_set=chosen)


def sample_integer(table: PrimeTable, x: int, seed: int) -> RandomInteger:
    if x > table.limit:
        raise ValueError(f"x={x} is beyond the table limit {table.limit}")
    primes = table.upto(x)
    if len(primes) > MAX_INTEGER_FACTORS:
        raise ResourceBoundError("pi(x)", len(primes), MAX_INTEGER_FACTORS)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    draws = rng.random(len(primes)) < 1.0 / primes.astype(np.float64)
    return RandomInteger.from_draws(primes, draws)


def normalize_batch(batch: SampleBatch, mu: float, sigma: float) -> np.ndarray:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return (batch.omegas - mu) / sigma
