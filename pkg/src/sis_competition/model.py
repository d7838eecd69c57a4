"""Parameters, states and transition rates of the two-strain SIS competition chain.

Strain ``i`` infects at per-capita rate ``lambda_i`` (contacts land on a
susceptible with probability ``1 - (X1 + X2)/N``) and recovers at rate
``mu_i``.  The single-strain logistic SIS chain is the ``X2 = 0`` slice.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

#: Cutoff on the near-criticality statistic above which the near-critical law
#: is reported as applicable.
NEAR_CRITICAL_STATISTIC_MIN = 10.0
#: Largest separation ``(R01 - R02)/(R01 - 1)`` still tagged near-critical.
NEAR_CRITICAL_SEPARATION_MAX = 0.25
#: Separation at or above which a TheoremTwo instance is flagged well separated.
WELL_SEPARATED_MIN = 10.0


@dataclass(frozen=True)
class ModelParams:
    lambda1: float
    mu1: float
    lambda2: float
    mu2: float
    n: int = 1

    def __post_init__(self):
        for name in ("lambda1", "mu1", "lambda2", "mu2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    def with_n(self, n: int) -> "ModelParams":
        return ModelParams(self.lambda1, self.mu1, self.lambda2, self.mu2, n)

    @property
    def fixed_point(self) -> float:
        """Strain-1 endemic fraction ``(lambda1 - mu1)/lambda1``."""
        return (self.lambda1 - self.mu1) / self.lambda1


@dataclass(frozen=True)
class ChainState:
    x1: int
    x2: int

    def __post_init__(self):
        if int(self.x1) != self.x1 or int(self.x2) != self.x2:
            raise ValueError("chain state counts must be integers")
        if self.x1 < 0 or self.x2 < 0:
            raise ValueError(f"negative count in state ({self.x1}, {self.x2})")
        object.__setattr__(self, "x1", int(self.x1))
        object.__setattr__(self, "x2", int(self.x2))

    def check(self, n: int) -> "ChainState":
        if self.x1 + self.x2 > n:
            raise ValueError(f"state ({self.x1}, {self.x2}) exceeds population size {n}")
        return self

    @classmethod
    def from_fractions(cls, alpha: float, beta: float, n: int) -> "ChainState":
        """Counts ``(floor(alpha*n), floor(beta*n))``."""
        return cls(int(math.floor(alpha * n)), int(math.floor(beta * n))).check(n)


class RateQuad(NamedTuple):
    up1: float
    down1: float
    up2: float
    down2: float

    @property
    def total(self) -> float:
        return self.up1 + self.down1 + self.up2 + self.down2


class RegimeTag(str, enum.Enum):
    THEOREM_TWO = "TheoremTwo"
    NEAR_CRITICAL = "NearCritical"
    EQUAL_STRENGTH = "EqualStrength"
    WEAK_DOMINANT = "WeakDominant"
    SUBCRITICAL_DOMINANT = "SubcriticalDominant"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    statistic: Optional[float] = None
    separation: Optional[float] = None
    well_separated: bool = False
    notes: tuple = ()

    @property
    def has_predictor(self) -> bool:
        return self.tag in (RegimeTag.THEOREM_TWO, RegimeTag.NEAR_CRITICAL)


def reproductive_ratios(params: ModelParams) -> tuple[float, float]:
    return params.lambda1 / params.mu1, params.lambda2 / params.mu2


def transition_rates(params: ModelParams, state: ChainState) -> RateQuad:
    n = params.n
    state.check(n)
    # (N - X1 - X2)/N rather than 1 - X1/N - X2/N: exact zero at full occupancy
    sus = (n - state.x1 - state.x2) / n
    return RateQuad(
        params.lambda1 * state.x1 * sus,
        params.mu1 * state.x1,
        params.lambda2 * state.x2 * sus,
        params.mu2 * state.x2,
    )


def near_critical_statistic(lambda1: float, lambda2: float, n: int) -> Optional[float]:
    """``N d^3 / (lambda1 - 1) / log log(N d^2)`` with ``d = lambda1 - lambda2``.

    None when undefined (``d <= 0``, ``lambda1 <= 1`` or ``N d^2 <= e``).
    """
    d = lambda1 - lambda2
    if d <= 0 or lambda1 <= 1:
        return None
    inner = n * d * d
    if inner <= math.e:
        return None
    return n * d**3 / (lambda1 - 1) / math.log(math.log(inner))


def classify_regime(params: ModelParams) -> Regime:
    r1, r2 = reproductive_ratios(params)
    unit_recovery = params.mu1 == 1.0 and params.mu2 == 1.0
    stat = None
    if unit_recovery and params.lambda1 > params.lambda2 > 1:
        stat = near_critical_statistic(params.lambda1, params.lambda2, params.n)

    if math.isclose(r1, r2, rel_tol=1e-12, abs_tol=0.0):
        return Regime(RegimeTag.EQUAL_STRENGTH, stat, 0.0, notes=("no predictor for equal strains",))
    if r1 < r2:
        return Regime(RegimeTag.WEAK_DOMINANT, stat, notes=("strain 2 is stronger; swap labels",))
    if r1 <= 1:
        return Regime(RegimeTag.SUBCRITICAL_DOMINANT, stat, notes=("both strains subcritical",))

    separation = (r1 - r2) / (r1 - 1)
    notes = []
    if (
        stat is not None
        and stat >= NEAR_CRITICAL_STATISTIC_MIN
        and separation <= NEAR_CRITICAL_SEPARATION_MAX
    ):
        tag = RegimeTag.NEAR_CRITICAL
    else:
        tag = RegimeTag.THEOREM_TWO
        if stat is not None and stat < NEAR_CRITICAL_STATISTIC_MIN:
            notes.append("near-critical statistic below cutoff")
    return Regime(
        tag,
        stat,
        separation,
        well_separated=separation >= WELL_SEPARATED_MIN,
        notes=tuple(notes),
    )


def zeeman_check(b: Sequence[float], a) -> bool:
    """Competitive-exclusion criterion for ``dx_i/dt = x_i (b_i - sum_j a_ij x_j)``.

    True when the first species' carrying-capacity state attracts the whole
    positive orthant: ``b_j/a_jj < b_i/a_ij`` for ``i < j`` and
    ``b_j/a_jj > b_i/a_ij`` for ``i > j``.
    """
    b = np.asarray(b, dtype=float)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    k = b.shape[0]
    if a.shape != (k, k):
        raise ValueError(f"competition matrix must be {k}x{k}, got {a.shape}")
    if np.any(b <= 0) or np.any(a <= 0):
        raise ValueError("growth rates and competition coefficients must be positive")
    for j in range(k):
        capacity = b[j] / a[j, j]
        for i in range(k):
            if i < j and not capacity < b[i] / a[i, j]:
                return False
            if i > j and not capacity > b[i] / a[i, j]:
                return False
    return True
