"""Independent random-sieve model of integers and its Erdos-Kac analogue."""

from .classical import OmegaCensus, ek_standardized_ks, omega_census, standardized_values
from .errors import ResourceBoundError
from .exact import (
    MomentReport,
    Pmf,
    exact_moments,
    ks_exact_vs_normal,
    lindeberg_sum,
    normal_cdf,
    poisson_binomial_pmf,
)
from .model import ModelParams, RandomInteger, SampleBatch, normalize_batch, sample_integer, sample_omega
from .primes import (
    PrimeTable,
    TailDivergenceReport,
    mertens_constant_estimate,
    prime_zeta_partial,
    reciprocal_sum,
    sieve_primes,
    tail_divergence_report,
)
from .stats import EmpiricalSummary, StepCdf, ks_empirical, summarize

__version__ = "0.1.0"
