"""Seeded samplers for E1 and E_B, and Monte Carlo moment estimates.

Sample ``index`` under ``seed`` is drawn from its own PCG64 stream seeded by
``SeedSequence(seed, spawn_key=(index,))``, so samples are reproducible one
at a time and independent of how a run is split across workers.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..errors import UnsupportedMeasure
from .kernel import subpermanent_poly
from .oracles import MeasureKind, MomentSpec


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample(measure: MeasureKind | str, spec: MomentSpec, seed: int, index: int = 0) -> np.ndarray:
    measure = MeasureKind(measure)
    rng = sample_rng(seed, index)
    n, r = spec.n, spec.r
    if measure is MeasureKind.E1:
        A = np.zeros((n, n), dtype=np.int64)
        rows = np.arange(n)
        for _ in range(r):
            # Generator.permutation is a Fisher-Yates shuffle
            A[rows, rng.permutation(n)] += 1
        return A
    if measure is MeasureKind.EB:
        # integers(0, n) < r is Bernoulli(r/n) with no float threshold
        return (rng.integers(0, n, size=(n, n)) < r).astype(np.int64)
    raise UnsupportedMeasure(f"sampling {measure.value!r} is not supported")


def monte_carlo_moment(
    measure: MeasureKind | str, spec: MomentSpec, samples: int, seed: int
) -> tuple[float, float]:
    """Sample mean and standard error of prod_k perm_{m_k}(A)."""
    if samples < 2:
        raise ValueError("need at least two samples")
    mmax = max(spec.m_list)
    total = 0
    total_sq = 0
    for i in range(samples):
        poly = subpermanent_poly(sample(measure, spec, seed, i), mmax)
        x = math.prod(poly[m] for m in spec.m_list)
        total += x
        total_sq += x * x
    mean = Fraction(total, samples)
    var = (total_sq - samples * mean * mean) / (samples - 1)
    return float(mean), math.sqrt(float(var) / samples)
