"""Census of the true omega(n) over 1 <= n <= x."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceBoundError
from .exact import normal_cdf
from .primes import PrimeTable
from .stats import ks_empirical

DEFAULT_CENSUS_CAP = 10**8
CENSUS_CAP_ENV = "RANDSIEVE_CENSUS_CAP"
# first n with log(log(n)) > 0 and a nondegenerate standardization
STANDARDIZE_FROM = 16


def census_cap() -> int:
    return int(os.environ.get(CENSUS_CAP_ENV, DEFAULT_CENSUS_CAP))


@dataclass(frozen=True, eq=False)
class OmegaCensus:
    x: int
    counts: dict[int, int]
    omega_total: int
    # omega(n) for n = 0..x (entry 0 unused); absent when loaded from a file
    per_n: np.ndarray | None = field(default=None, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OmegaCensus):
            return NotImplemented
        return (self.x, self.counts, self.omega_total) == (other.x, other.counts, other.omega_total)


def omega_census(table: PrimeTable, x: int, cap: int | None = None) -> OmegaCensus:
    """Count distinct prime factors of every n <= x by striding over multiples of each prime."""
    x = int(x)
    cap = census_cap() if cap is None else cap
    if x > cap:
        raise ResourceBoundError("x", x, cap)
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if x > table.limit:
        raise ValueError(f"x={x} is beyond the table limit {table.limit}")
    # one byte per n: no n below 2**64 has more than 15 distinct prime factors
    omega = np.zeros(x + 1, dtype=np.uint8)
    for p in table.upto(x).tolist():
        omega[p::p] += 1
    values, freq = np.unique(omega[1:], return_counts=True)
    return OmegaCensus(
        x=x,
        counts={int(v): int(c) for v, c in zip(values, freq)},
        omega_total=int(omega.sum(dtype=np.int64)),
        per_n=omega,
    )


def standardized_values(census: OmegaCensus) -> np.ndarray:
    """(omega(n) - log log n) / sqrt(log log n) for 16 <= n <= x."""
    if census.per_n is None:
        raise ValueError("census was loaded without per-n values; recompute it")
    n = np.arange(STANDARDIZE_FROM, census.x + 1, dtype=np.float64)
    ll = np.log(np.log(n))
    return (census.per_n[STANDARDIZE_FROM:] - ll) / np.sqrt(ll)


def ek_standardized_ks(census: OmegaCensus) -> float:
    """KS distance between the per-n standardized omega(n) values and Phi."""
    if census.x < 100:
        raise ValueError(f"census x must be >= 100, got {census.x}")
    return ks_empirical(standardized_values(census), normal_cdf)
