"""Location-scale extinction-time laws: Gumbel and exponential."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class GumbelLaw:
    """``P(T <= t) = exp(-exp(-(t - location)/scale))``.

    ``notes`` carries applicability remarks; ``regime`` and ``statistic``
    echo the classifier output when the law came from a predictor.
    """

    location: float
    scale: float
    notes: tuple = ()
    regime: str | None = None
    statistic: float | None = None

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale!r}")
        if not math.isfinite(self.location):
            raise ValueError(f"location must be finite, got {self.location!r}")

    def cdf(self, t):
        return np.exp(-np.exp(-(np.asarray(t, dtype=float) - self.location) / self.scale))

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        with np.errstate(divide="ignore"):
            return self.location - self.scale * np.log(-np.log(p))

    @property
    def mean(self) -> float:
        return self.location + EULER_GAMMA * self.scale

    @property
    def variance(self) -> float:
        return (math.pi * self.scale) ** 2 / 6

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.gumbel(self.location, self.scale, size)

    def standardize(self, t):
        return (np.asarray(t, dtype=float) - self.location) / self.scale


STANDARD_GUMBEL = GumbelLaw(0.0, 1.0)


@dataclass(frozen=True)
class ExponentialLaw:
    """Exponential law by its mean; ``log_mean`` survives when ``mean`` overflows."""

    mean: float
    log_mean: float = field(default=math.nan)
    notes: tuple = ()
    v: float | None = None

    def __post_init__(self):
        if not self.mean > 0:
            raise ValueError(f"mean must be positive, got {self.mean!r}")
        if math.isnan(self.log_mean):
            object.__setattr__(self, "log_mean", math.log(self.mean))

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, -np.expm1(-np.maximum(t, 0) / self.mean), 0.0)

    def quantile(self, p):
        return -self.mean * np.log1p(-np.asarray(p, dtype=float))

    @property
    def variance(self) -> float:
        return self.mean**2

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.exponential(self.mean, size)
