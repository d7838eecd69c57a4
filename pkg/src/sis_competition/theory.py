"""Extinction-time predictors.

Every predictor returns a law together with annotations (regime tag,
near-critical statistic, remarks) rather than refusing borderline inputs;
the limit theorems behind them are asymptotic in ``N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import fluid
from .bdchain import BdParams, bd_gumbel_limit
from .errors import RegimeError
from .laws import EULER_GAMMA, ExponentialLaw, GumbelLaw, STANDARD_GUMBEL
from .model import ModelParams, classify_regime, near_critical_statistic, reproductive_ratios

__all__ = [
    "EULER_GAMMA", "GumbelLaw", "ExponentialLaw", "STANDARD_GUMBEL", "PhaseBreakdown",
    "predict_kappa_thm2", "predict_kappa_nearcrit", "predict_tau_supercritical",
    "predict_sis_subcritical", "phase_breakdown",
]


def _check_fractions(alpha: float, beta: float) -> None:
    if not (alpha > 0 and beta > 0 and alpha + beta <= 1):
        raise ValueError(f"need alpha, beta > 0 and alpha + beta <= 1 (got {alpha}, {beta})")


def _require_exclusion(params: ModelParams) -> tuple[float, float]:
    r1, r2 = reproductive_ratios(params)
    if not (r1 > r2 and r1 > 1) or math.isclose(r1, r2, rel_tol=1e-12):
        raise RegimeError(f"needs R01 > R02 and R01 > 1 (got {r1:.6g}, {r2:.6g})")
    return r1, r2


def predict_kappa_thm2(params: ModelParams, alpha: float, beta: float) -> GumbelLaw:
    """Gumbel law of the weaker strain's extinction time from ``(alpha N, beta N)``."""
    r1, r2 = _require_exclusion(params)
    _check_fractions(alpha, beta)
    ratio = 1 - r2 / r1
    inner = params.n * beta * ratio
    outer = (1 - 1 / r1) / alpha
    if inner <= 0 or outer <= 0:
        raise ValueError("nonpositive logarithm argument")
    scale = 1 / (params.mu2 * ratio)
    weight = r2 * params.mu2 / (r1 * params.mu1)
    regime = classify_regime(params)
    return GumbelLaw(scale * (math.log(inner) + weight * math.log(outer)), scale,
                     notes=regime.notes, regime=regime.tag.value, statistic=regime.statistic)


def predict_kappa_nearcrit(params: ModelParams, alpha: float, beta: float) -> GumbelLaw:
    """Gumbel law for unit recovery rates and ``lambda1 > lambda2 > 1``."""
    l1, l2 = params.lambda1, params.lambda2
    if params.mu1 != 1 or params.mu2 != 1:
        raise RegimeError("the near-critical law assumes mu1 = mu2 = 1")
    if not l1 > l2 > 1:
        raise RegimeError("the near-critical law assumes lambda1 > lambda2 > 1")
    _check_fractions(alpha, beta)
    scale = l1 / (l1 - l2)
    arg = params.n * (l1 - 1) * (l1 - l2) * beta / (l1 * l1 * alpha)
    if arg <= 0:
        raise ValueError("nonpositive logarithm argument")
    stat = near_critical_statistic(l1, l2, params.n)
    notes = []
    if stat is None or stat < 10:
        notes.append("near-critical statistic small; the limit may not be reached")
    return GumbelLaw(scale * math.log(arg), scale, notes=tuple(notes),
                     regime=classify_regime(params).tag.value, statistic=stat)


def predict_tau_supercritical(lam: float, mu: float, n: int) -> ExponentialLaw:
    """Exponential law of the logistic SIS extinction time above threshold.

    ``log_mean`` is exact even where ``mean`` overflows to ``inf``.
    """
    if not lam > mu > 0:
        raise RegimeError("needs lambda > mu > 0")
    if n < 1:
        raise ValueError("n must be positive")
    v = math.log(lam / mu) - 1 + mu / lam
    log_mean = 0.5 * math.log(2 * math.pi / n) + math.log(lam / (lam - mu) ** 2) + n * v
    mean = math.exp(log_mean) if log_mean < 709 else math.inf
    return ExponentialLaw(mean, log_mean, v=v)


def predict_sis_subcritical(lam: float, mu: float, n: int, alpha: float) -> GumbelLaw:
    """Gumbel law of the logistic SIS extinction time below threshold, from ``alpha N``."""
    if not (mu > lam >= 0):
        raise RegimeError("needs mu > lambda >= 0")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    scale = 1 / (mu - lam)
    notes = ()
    if alpha < 1 / n:
        notes = ("alpha < 1/N: fewer than one initial infective",)
    loc = scale * (math.log(alpha) + math.log(n) + math.log1p(-lam / mu)
                   - math.log1p(lam * alpha / (mu - lam)))
    return GumbelLaw(loc, scale, notes=notes)


@dataclass(frozen=True)
class PhaseBreakdown:
    burn_in: float
    intermediate: float
    final_law: GumbelLaw
    total_law: GumbelLaw
    crossing_time: float
    x1_at_crossing: float


def phase_breakdown(params: ModelParams, alpha: float, beta: float) -> PhaseBreakdown:
    """Split the predicted extinction time into burn-in, drift to ``x2 = N^(-1/4)``, final decay.

    The first two phases are fluid travel times along the orbit from
    ``(alpha, beta)``; the last is the Gumbel limit of the linear
    birth-death chain started from ``N^(3/4)``.
    """
    _require_exclusion(params)
    _check_fractions(alpha, beta)
    n = params.n
    level = n ** -0.25
    t_hit = fluid.crossing_time(params, (alpha, beta), level)
    x1c = float(fluid.integrate(params, (alpha, beta), t_hit)(t_hit)[0]) if t_hit > 0 else alpha
    t_c = fluid.travel_time(params, (alpha, beta), (x1c, min(beta, level))) if t_hit > 0 else 0.0
    t0 = fluid.burn_in_time(params, (alpha, beta))
    burn_in = min(t0, t_c)
    intermediate = max(0.0, t_c - t0)
    final = bd_gumbel_limit(BdParams(params.lambda2 * params.mu1 / params.lambda1,
                                     params.mu2, n ** 0.75))
    total = GumbelLaw(burn_in + intermediate + final.location, final.scale, notes=final.notes)
    return PhaseBreakdown(burn_in, intermediate, final, total, t_c, x1c)
