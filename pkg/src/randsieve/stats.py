"""Empirical summaries and Kolmogorov-Smirnov distances for sample batches."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import Pmf
from .model import SampleBatch


@dataclass(frozen=True)
class EmpiricalSummary:
    n: int
    mean: float
    variance: float
    histogram: dict[int, int]
    ks_vs_normal: float | None = None
    ks_vs_exact: float | None = None


def summarize(batch: SampleBatch) -> EmpiricalSummary:
    omegas = np.asarray(batch.omegas)
    if omegas.size == 0:
        raise ValueError("cannot summarize an empty batch")
    n = int(omegas.size)
    mean = math.fsum(omegas.tolist()) / n
    variance = math.fsum(((omegas - mean) ** 2).tolist()) / (n - 1) if n > 1 else 0.0
    values, counts = np.unique(omegas, return_counts=True)
    return EmpiricalSummary(
        n=n,
        mean=mean,
        variance=variance,
        histogram={int(v): int(c) for v, c in zip(values, counts)},
    )


class StepCdf:
    """Right-continuous step distribution function with jumps at ``points``.

    ``levels[i]`` is the CDF value on [points[i], points[i+1]).
    """

    def __init__(self, points, levels):
        self.points = np.asarray(points, dtype=np.float64)
        self.levels = np.asarray(levels, dtype=np.float64)
        if self.points.shape != self.levels.shape:
            raise ValueError("points and levels must have the same length")
        if np.any(np.diff(self.points) <= 0):
            raise ValueError("jump points must be strictly increasing")

    @classmethod
    def from_pmf(cls, pmf: Pmf) -> "StepCdf":
        return cls(np.arange(len(pmf.mass)), pmf.cdf())

    @classmethod
    def from_samples(cls, samples) -> "StepCdf":
        values, counts = np.unique(np.asarray(samples, dtype=np.float64), return_counts=True)
        return cls(values, np.cumsum(counts) / counts.sum())

    def __call__(self, t):
        idx = np.searchsorted(self.points, t, side="right")
        padded = np.concatenate(([0.0], self.levels))
        return padded[idx]

    def left(self, t):
        """Left limit F(t-)."""
        idx = np.searchsorted(self.points, t, side="left")
        padded = np.concatenate(([0.0], self.levels))
        return padded[idx]


def ks_empirical(samples, cdf) -> float:
    """sup_t |F_n(t) - cdf(t)|.

    ``cdf`` is a vectorized callable. A ``StepCdf`` is compared on the union
    of its jumps and the sample points, using left limits on both sides; any
    other callable is treated as continuous.
    """
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = xs.size
    if n == 0:
        raise ValueError("samples must be nonempty")
    emp = StepCdf.from_samples(xs)
    if isinstance(cdf, StepCdf):
        points = np.union1d(emp.points, cdf.points)
        theirs_at, theirs_left = cdf(points), cdf.left(points)
    else:
        points = emp.points
        theirs_at = theirs_left = np.asarray(cdf(points), dtype=np.float64)
    d = max(
        float(np.max(np.abs(emp(points) - theirs_at))),
        float(np.max(np.abs(emp.left(points) - theirs_left))),
    )
    return min(1.0, d)
