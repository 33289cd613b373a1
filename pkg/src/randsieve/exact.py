"""Exact law, moments and CLT diagnostics for the prime-factor count of N_x.

Omega_x is a sum of independent Bernoulli(1/p) variables over p <= x, so its
law is Poisson-binomial and everything here is a finite computation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .primes import PrimeTable, prime_zeta_partial, reciprocal_sum

TAIL_WARNING_LEVEL = 1e-9


@dataclass(frozen=True)
class MomentReport:
    x: int
    mu: float
    sigma_sq: float
    loglog_x: float | None
    mertens_gap: float | None
    zeta_partial: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_sq)


def _variance_terms(table: PrimeTable, x: int) -> np.ndarray:
    q = 1.0 / table.upto(x).astype(np.float64)
    return q * (1.0 - q)


def exact_moments(table: PrimeTable, x: int, allow_small: bool = False) -> MomentReport:
    """Mean and variance of Omega_x as finite sums over primes <= x.

    The variance is summed term by term from p(1 - p) rather than taken as
    ``mu - zeta_partial``, so the identity between them is a real check.
    With ``allow_small`` the bound x = 2 is accepted and the log-log fields
    are left as None.
    """
    x = int(x)
    if x > table.limit:
        raise ValueError(f"x={x} is beyond the table limit {table.limit}")
    if x < 3 and not (allow_small and x == 2):
        raise ValueError(f"x must be >= 3, got {x}")
    mu = reciprocal_sum(table, x)
    sigma_sq = math.fsum(_variance_terms(table, x))
    loglog = math.log(math.log(x)) if x >= 3 else None
    return MomentReport(
        x=x,
        mu=mu,
        sigma_sq=sigma_sq,
        loglog_x=loglog,
        mertens_gap=None if loglog is None else mu - loglog,
        zeta_partial=prime_zeta_partial(table, x),
    )


@dataclass(frozen=True, eq=False)
class Pmf:
    """P(Omega_x = k) for k = 0..support_cap, plus the mass cut off above the cap."""

    x: int
    support_cap: int
    mass: np.ndarray = field(repr=False)
    truncated_tail: float

    @property
    def tail_warning(self) -> bool:
        return self.truncated_tail > TAIL_WARNING_LEVEL

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.mass)

    def mean(self) -> float:
        k = np.arange(len(self.mass))
        return math.fsum(k * self.mass)

    def variance(self) -> float:
        k = np.arange(len(self.mass))
        m = self.mean()
        return math.fsum((k - m) ** 2 * self.mass)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return (
            self.x == other.x
            and self.support_cap == other.support_cap
            and self.truncated_tail == other.truncated_tail
            and np.array_equal(self.mass, other.mass)
        )


def default_support_cap(mu: float, sigma: float) -> int:
    return math.ceil(mu + 12.0 * sigma + 30.0)


def poisson_binomial_pmf(table: PrimeTable, x: int, support_cap: int | None = None) -> Pmf:
    """Exact pmf of Omega_x by folding in one prime at a time.

    Mass pushed above ``support_cap`` is accumulated in ``truncated_tail``;
    nothing is renormalized.
    """
    x = int(x)
    if x > table.limit:
        raise ValueError(f"x={x} is beyond the table limit {table.limit}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    primes = table.upto(x)
    if support_cap is None:
        q = 1.0 / primes.astype(np.float64)
        support_cap = default_support_cap(float(q.sum()), math.sqrt(float((q * (1 - q)).sum())))
    if support_cap < 1:
        raise ValueError(f"support_cap must be >= 1, got {support_cap}")

    mass = np.zeros(support_cap + 1)
    mass[0] = 1.0
    tail = 0.0
    top = 0  # highest index that can be nonzero so far
    for p in primes:
        q = 1.0 / float(p)
        if top == support_cap:
            tail += mass[support_cap] * q
            shifted = mass[:support_cap] * q
            mass *= 1.0 - q
            mass[1:] += shifted
        else:
            shifted = mass[: top + 1] * q
            mass[: top + 1] *= 1.0 - q
            mass[1 : top + 2] += shifted
            top += 1
    result = Pmf(x=x, support_cap=support_cap, mass=mass, truncated_tail=tail)
    if result.tail_warning:
        warnings.warn(
            f"support_cap={support_cap} leaves {tail:.3g} of mass untracked at x={x}",
            RuntimeWarning,
            stacklevel=2,
        )
    return result


def lindeberg_sum(table: PrimeTable, x: int, epsilon: float) -> float:
    """Lindeberg functional L(x, eps) for the centred summands Y_p = X_p - 1/p.

    Y_p takes 1 - 1/p with probability 1/p and -1/p otherwise; each branch
    contributes to the numerator only when its magnitude exceeds eps*sigma_x.
    When both branches qualify the contribution is the full variance
    q(1 - q), written in the same form as the denominator so the all-in case
    evaluates to exactly 1.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    x = int(x)
    if x < 3 or x > table.limit:
        raise ValueError(f"x must satisfy 3 <= x <= {table.limit}, got {x}")
    q = 1.0 / table.upto(x).astype(np.float64)
    var = q * (1.0 - q)
    sigma_sq = math.fsum(var)
    threshold = epsilon * math.sqrt(sigma_sq)
    up = (1.0 - q) > threshold
    down = q > threshold
    contrib = np.where(
        up & down,
        var,
        np.where(up, q * (1.0 - q) ** 2, 0.0) + np.where(down, (1.0 - q) * q * q, 0.0),
    )
    return math.fsum(contrib) / sigma_sq


def normal_cdf(z):
    """Standard normal distribution function; accepts scalars or arrays."""
    if np.ndim(z) == 0:
        return 0.5 * math.erfc(-float(z) / math.sqrt(2.0))
    return 0.5 * special.erfc(-np.asarray(z, dtype=np.float64) / math.sqrt(2.0))


def ks_exact_vs_normal(pmf: Pmf, mu: float, sigma: float) -> float:
    """Sup distance between the law of (Omega_x - mu)/sigma and Phi.

    Between jumps the exact CDF is flat and Phi is monotone, so the sup is
    attained at a jump edge: compare Phi against the CDF value on both sides
    of every support point, and against the untracked tail at +infinity.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if pmf.truncated_tail > TAIL_WARNING_LEVEL:
        raise ValueError(
            f"pmf truncated_tail={pmf.truncated_tail:.3g} is too large; raise support_cap"
        )
    after = pmf.cdf()
    before = np.concatenate(([0.0], after[:-1]))
    z = (np.arange(len(pmf.mass)) - mu) / sigma
    phi = normal_cdf(z)
    gap = max(float(np.max(np.abs(after - phi))), float(np.max(np.abs(before - phi))))
    return min(1.0, max(gap, pmf.truncated_tail))
