"""Prime tables and the reciprocal sums built on them.

The sieve is a segmented sieve of Eratosthenes over odd numbers only. Each
table carries prefix sums of 1/p and 1/p**2 so that partial sums up to any
bound are a binary search plus one lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceBoundError

DEFAULT_MAX_LIMIT = 10**9
SEGMENT_ODDS = 1 << 21  # odd numbers per segment (~2 MiB bool mask)


def _small_odd_primes(limit: int) -> np.ndarray:
    """Odd primes <= limit via a plain odd-only sieve."""
    if limit < 3:
        return np.empty(0, dtype=np.int64)
    # index i stands for 2*i + 1
    size = (limit - 1) // 2 + 1
    mask = np.ones(size, dtype=bool)
    mask[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if mask[i]:
            p = 2 * i + 1
            mask[(p * p) // 2 :: p] = False
    return 2 * np.flatnonzero(mask).astype(np.int64) + 1


def _segmented_odd_sieve(limit: int, segment: int = SEGMENT_ODDS) -> np.ndarray:
    base = _small_odd_primes(math.isqrt(limit))
    hi_index = (limit - 1) // 2 + 1  # one past the index of the largest odd <= limit
    chunks = []
    lo = 1  # skip index 0 (the number 1)
    while lo < hi_index:
        hi = min(lo + segment, hi_index)
        mask = np.ones(hi - lo, dtype=bool)
        top = 2 * (hi - 1) + 1
        for p in base:
            p = int(p)
            sq = p * p
            if sq > top:
                break
            first = 2 * lo + 1
            start = max(sq, ((first + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            idx = (start - 1) // 2 - lo
            if idx < hi - lo:
                mask[idx::p] = False
        chunks.append(2 * (np.flatnonzero(mask) + lo) + 1)
        lo = hi
    if not chunks:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(chunks).astype(np.int64)


def _reciprocal_prefixes(primes: np.ndarray, block: int = 1 << 20) -> tuple[np.ndarray, np.ndarray]:
    """Running sums of 1/p and 1/p**2, accumulated in extended precision.

    Each entry is rounded to float64 once; the carried totals never are.
    Blocks keep the long double temporaries small at 10**9.
    """
    recip = np.empty(len(primes))
    recip_sq = np.empty(len(primes))
    carry = carry_sq = np.longdouble(0)
    for lo in range(0, len(primes), block):
        inv = 1 / primes[lo : lo + block].astype(np.longdouble)
        run = np.cumsum(inv) + carry
        run_sq = np.cumsum(inv * inv) + carry_sq
        recip[lo : lo + block] = run
        recip_sq[lo : lo + block] = run_sq
        carry, carry_sq = run[-1], run_sq[-1]
    return recip, recip_sq


def frozen_array(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primes up to ``limit`` with prefix sums of 1/p and 1/p**2.

    ``recip_prefix[k]`` is the sum of 1/p over ``primes[:k + 1]``. Arrays are
    read-only, so a table can be shared between threads.
    """

    limit: int
    primes: np.ndarray = field(repr=False)
    recip_prefix: np.ndarray = field(repr=False)
    recip_sq_prefix: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return (
            self.limit == other.limit
            and np.array_equal(self.primes, other.primes)
            and np.array_equal(self.recip_prefix, other.recip_prefix)
            and np.array_equal(self.recip_sq_prefix, other.recip_sq_prefix)
        )

    def count_upto(self, x: int) -> int:
        """pi(x), the number of primes <= x (x may not exceed ``limit``)."""
        _check_in_table(self, x)
        return int(np.searchsorted(self.primes, x, side="right"))

    def upto(self, x: int) -> np.ndarray:
        return self.primes[: self.count_upto(x)]


def sieve_primes(limit: int, max_limit: int = DEFAULT_MAX_LIMIT) -> PrimeTable:
    """Sieve all primes <= ``limit`` and build their reciprocal prefix sums."""
    limit = int(limit)
    if limit < 0:
        raise ValueError(f"limit must be nonnegative, got {limit}")
    if limit > max_limit:
        raise ResourceBoundError("limit", limit, max_limit)
    if limit < 2:
        primes = np.empty(0, dtype=np.int64)
    else:
        primes = np.concatenate(([2], _segmented_odd_sieve(limit))).astype(np.int64)
    recip, recip_sq = _reciprocal_prefixes(primes)
    return PrimeTable(
        limit=limit,
        primes=frozen_array(primes),
        recip_prefix=frozen_array(recip),
        recip_sq_prefix=frozen_array(recip_sq),
    )


def _check_in_table(table: PrimeTable, x: int) -> None:
    if x > table.limit:
        raise ValueError(f"x={x} is beyond the table limit {table.limit}")


def _prefix_at(table: PrimeTable, prefix: np.ndarray, x: int) -> float:
    k = table.count_upto(x)
    return float(prefix[k - 1]) if k else 0.0


def reciprocal_sum(table: PrimeTable, x: int) -> float:
    """Sum of 1/p over primes p <= x."""
    return _prefix_at(table, table.recip_prefix, x)


def prime_zeta_partial(table: PrimeTable, x: int) -> float:
    """Sum of 1/p**2 over primes p <= x; tends to P(2) = 0.45224..."""
    return _prefix_at(table, table.recip_sq_prefix, x)


def mertens_constant_estimate(table: PrimeTable, x: int) -> float:
    """``reciprocal_sum(x) - log(log(x))``, which tends to the Meissel-Mertens constant."""
    if x < 3:
        raise ValueError(f"x must be >= 3 for log(log(x)) to be positive, got {x}")
    return reciprocal_sum(table, x) - math.log(math.log(x))


@dataclass(frozen=True)
class TailDivergenceReport:
    """Sum of 1/p over x0 < p <= x1.

    The same number is the expected count of newly switched-on prime factors
    when the truncation bound is raised from x0 to x1.
    """

    x0: int
    x1: int
    tail_sum: float
    expected_new_factors: float


def tail_divergence_report(table: PrimeTable, x0: int, x1: int) -> TailDivergenceReport:
    if x0 >= x1:
        raise ValueError(f"need x0 < x1, got x0={x0}, x1={x1}")
    if x0 < 0:
        raise ValueError(f"x0 must be nonnegative, got {x0}")
    tail = reciprocal_sum(table, x1) - reciprocal_sum(table, x0)
    return TailDivergenceReport(x0=x0, x1=x1, tail_sum=tail, expected_new_factors=tail)
