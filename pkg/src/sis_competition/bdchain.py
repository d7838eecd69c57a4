"""Extinction time of the subcritical linear birth-death chain.

Each of ``y0`` independent lineages (birth ``lam``, death ``mu`` per head)
dies out by time ``t`` with probability ``1 - r e^{-rt}/(mu - lam e^{-rt})``,
``r = mu - lam``; the chain is extinct when all of them are.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeError
from .laws import GumbelLaw

#: Below this gap ``mu - lam`` the chain is treated as critical and rejected.
CRITICAL_GAP = 1e-12
#: ``y0 * (mu - lam)`` below this earns an applicability note on the limit law.
GUMBEL_NOTE_THRESHOLD = 10.0


@dataclass(frozen=True)
class BdParams:
    lam: float
    mu: float
    y0: float

    def __post_init__(self):
        if self.lam < 0 or self.mu <= 0 or self.y0 < 0:
            raise ValueError("need lam >= 0, mu > 0 and y0 >= 0")

    def _gap(self) -> float:
        gap = self.mu - self.lam
        if gap < CRITICAL_GAP:
            raise RegimeError(f"needs mu > lam (gap {gap:.3g}); critical and supercritical "
                              "chains are not covered")
        return gap

    def cdf(self, t):
        return bd_extinction_cdf(self, t)

    def quantile(self, p):
        return bd_extinction_quantile(self, p)


def bd_extinction_cdf(p: BdParams, t):
    r = p._gap()
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    if p.y0 == 0:
        return np.ones_like(t)
    e = np.exp(-r * t)
    q = r * e / (p.mu - p.lam * e)
    with np.errstate(divide="ignore"):
        return np.exp(p.y0 * np.log1p(-q))


def bd_extinction_quantile(p: BdParams, prob):
    """Exact inverse of :func:`bd_extinction_cdf` (solved for ``e^{-rt}``)."""
    r = p._gap()
    prob = np.asarray(prob, dtype=float)
    if np.any((prob < 0) | (prob > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    if p.y0 == 0:
        return np.zeros_like(prob)
    with np.errstate(divide="ignore"):
        q = -np.expm1(np.log(prob) / p.y0)
        e = q * p.mu / (r + q * p.lam)
        return -np.log(e) / r


def bd_gumbel_limit(p: BdParams) -> GumbelLaw:
    r = p._gap()
    if p.y0 < 1:
        raise ValueError("the limit law needs y0 >= 1")
    notes = ()
    if p.y0 * r < GUMBEL_NOTE_THRESHOLD:
        notes = (f"y0*(mu - lam) = {p.y0 * r:.3g} is small; the Gumbel limit needs it large",)
    location = (math.log(p.y0) + math.log(r) - math.log(p.mu)) / r
    return GumbelLaw(location, 1.0 / r, notes=notes)
