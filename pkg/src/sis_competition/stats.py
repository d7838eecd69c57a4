"""Empirical checks against extinction-time laws.

Any object with a vectorised ``cdf`` method works as a law here, which
covers ``GumbelLaw``, ``ExponentialLaw`` and ``BdParams``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .laws import EULER_GAMMA, GumbelLaw


@dataclass(frozen=True)
class SampleSet:
    values: np.ndarray
    censored_count: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise ValueError("sample values must be finite; pass censored entries via from_samples")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_samples(cls, values, censored=None) -> "SampleSet":
        """Keep uncensored entries only; ``censored`` is a boolean mask (default: none)."""
        values = np.asarray(values, dtype=float)
        if censored is None:
            censored = np.zeros(values.shape, dtype=bool)
        censored = np.asarray(censored, dtype=bool)
        if censored.shape != values.shape:
            raise ValueError("values and censored mask differ in shape")
        return cls(values[~censored], int(censored.sum()))

    def __len__(self) -> int:
        return self.values.size


class Summary(NamedTuple):
    mean: float
    variance: float
    mean_ci_95: tuple[float, float]
    count: int
    censored_count: int


def ks_distance(samples: SampleSet, law) -> float:
    """Sup distance between the empirical CDF and ``law.cdf``, evaluated on both sides of every jump."""
    m = len(samples)
    if m == 0:
        raise ValueError("no uncensored samples")
    x = np.sort(samples.values)
    f = np.asarray(law.cdf(x), dtype=float)
    upper = np.arange(1, m + 1) / m - f
    lower = f - np.arange(m) / m
    return float(max(upper.max(), lower.max()))


def gumbel_fit_moments(samples: SampleSet) -> GumbelLaw:
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    std = float(np.std(samples.values, ddof=1))
    if std == 0:
        raise ValueError("zero sample variance: cannot fit a scale")
    scale = std * math.sqrt(6) / math.pi
    return GumbelLaw(float(np.mean(samples.values)) - EULER_GAMMA * scale, scale)


def standardize(samples: SampleSet, law: GumbelLaw) -> SampleSet:
    return SampleSet((samples.values - law.location) / law.scale, samples.censored_count)


def summary_stats(samples: SampleSet) -> Summary:
    m = len(samples)
    if m < 2:
        raise ValueError("need at least two samples")
    mean = float(np.mean(samples.values))
    var = float(np.var(samples.values, ddof=1))
    half = 1.96 * math.sqrt(var / m)
    return Summary(mean, var, (mean - half, mean + half), m, samples.censored_count)


def kolmogorov_critical(m: int, level: float = 0.01) -> float:
    """Asymptotic Kolmogorov critical value ``sqrt(-log(level/2)/2) / sqrt(m)``."""
    return math.sqrt(-0.5 * math.log(level / 2)) / math.sqrt(m)
