"""Deterministic (fluid-limit) side of the competition model.

The ODE ``dx_i/dt = lambda_i x_i (1 - x1 - x2) - mu_i x_i`` is integrated in
log coordinates ``u_i = log x_i``; there the right-hand side is
``lambda_i (1 - x1 - x2) - mu_i`` and the combination
``lambda2 u1 - lambda1 u2`` grows exactly linearly, a linear invariant that
every Runge-Kutta step preserves.  A zero coordinate stays zero (the axes are
invariant) and is simply carried along.

Also here: spectral data at the exclusion fixed point, eigen-coordinates,
decay envelopes, the Lyapunov function, phase times, and the tracking
certificates for the burn-in and long-horizon phases.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import InapplicableError, IntegrationError, NoConvergenceError, RegimeError
from .model import ModelParams

REPEATED_TOL = 1e-9
ILL_CONDITIONED_TOL = 1e-3
ROOT_XTOL = 1e-12


class FluidState(NamedTuple):
    x1: float
    x2: float

    def check(self) -> "FluidState":
        if self.x1 < 0 or self.x2 < 0 or self.x1 + self.x2 > 1 + 1e-12:
            raise ValueError(f"not a valid fraction pair: {tuple(self)}")
        return self


class EigenState(NamedTuple):
    tx1: float
    tx2: float


@dataclass(frozen=True)
class SpectralData:
    eta1: float
    eta2: float
    a: float
    L: float
    Ltilde: float
    L1: float
    b: float
    a1: float
    a2: float
    repeated: bool


class Envelope(NamedTuple):
    tx1_abs_upper: float
    x2_upper: float
    x2_lower: float
    branch: str


class Phase1Bound(NamedTuple):
    deviation_bound: float
    probability_bound: float
    vacuous: bool


class TrackingBound(NamedTuple):
    deviation_bound: float
    probability_bound: float
    horizon: int
    vacuous: bool


def drift(params: ModelParams, x) -> tuple[float, float]:
    x1, x2 = x
    sus = 1.0 - x1 - x2
    return (params.lambda1 * x1 * sus - params.mu1 * x1,
            params.lambda2 * x2 * sus - params.mu2 * x2)


class FluidTrajectory:
    """Dense solution on ``[0, t_end]``; call it with a time (or array of times)."""

    def __init__(self, t, x, interpolant, active, t_end):
        self.t = t
        self.x = x
        self._interp = interpolant
        self._active = active
        self.t_end = t_end

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros((2,) + t_arr.shape)
        if self._interp is not None:
            u = self._interp(t_arr)
            out[self._active] = np.exp(u)
        elif self.x.shape[1]:
            out += self.x[:, :1].reshape((2,) + (1,) * t_arr.ndim)
        return out


def integrate(params: ModelParams, x0, t_end: float, rel_tol: float = 1e-9,
              abs_tol: float = 1e-12) -> FluidTrajectory:
    """Dormand-Prince 5(4) with dense output, in log coordinates."""
    x0 = FluidState(*map(float, x0)).check()
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    if not 0 < rel_tol <= 1e-3:
        raise ValueError("rel_tol must lie in (0, 1e-3]")
    active = np.array([x0.x1 > 0, x0.x2 > 0])
    if not active.any() or t_end == 0:
        x = np.array([[x0.x1], [x0.x2]])
        return FluidTrajectory(np.array([0.0]), x, None, active, t_end)

    lam = np.array([params.lambda1, params.lambda2])[active]
    mu = np.array([params.mu1, params.mu2])[active]

    def rhs(_t, u):
        return lam * (1.0 - np.exp(u).sum()) - mu

    u0 = np.log(np.array(x0)[active])
    sol = solve_ivp(rhs, (0.0, t_end), u0, method="RK45", rtol=rel_tol, atol=abs_tol,
                    dense_output=True)
    if sol.status != 0:
        raise IntegrationError(sol.message)
    x = np.zeros((2, sol.t.size))
    x[active] = np.exp(sol.y)
    return FluidTrajectory(sol.t, x, sol.sol, active, t_end)


def relation_residual(params: ModelParams, x0, xt, t: float) -> float:
    """Defect in the first integral ``x1^l2 / x2^l1 = const * exp((mu2 l1 - mu1 l2) t)``, in log form."""
    if min(x0) <= 0 or min(xt) <= 0:
        raise ValueError("relation residual needs strictly positive coordinates")
    l1, l2 = params.lambda1, params.lambda2
    now = l2 * math.log(xt[0]) - l1 * math.log(xt[1])
    then = l2 * math.log(x0[0]) - l1 * math.log(x0[1])
    return now - then - (params.mu2 * l1 - params.mu1 * l2) * t


def travel_time(params: ModelParams, start, end) -> float:
    """Time the fluid path needs to go from ``start`` to ``end`` (assumed on one orbit)."""
    if min(start) <= 0 or min(end) <= 0:
        raise ValueError("travel time needs strictly positive coordinates")
    l1, l2 = params.lambda1, params.lambda2
    denom = params.mu2 * l1 - params.mu1 * l2
    if denom == 0:
        raise ZeroDivisionError("mu2*lambda1 == mu1*lambda2: travel time undefined")
    return (l2 * math.log(end[0] / start[0]) - l1 * math.log(end[1] / start[1])) / denom


def logistic_closed_form(lam: float, mu: float, y0: float, t):
    """Single-strain logistic solution from ``y0`` (supercritical case only)."""
    if not lam > mu > 0:
        raise RegimeError("closed form is stated for lambda > mu > 0")
    if not 0 < y0 <= 1:
        raise ValueError("y0 must lie in (0, 1]")
    r = lam - mu
    return y0 * r / (lam * y0 + lam * np.exp(-r * np.asarray(t, dtype=float)) * (r / lam - y0))


def eigen_decomposition(params: ModelParams) -> SpectralData:
    l1, m1, l2, m2 = params.lambda1, params.mu1, params.lambda2, params.mu2
    eta1 = l1 - m1
    eta2 = m2 - l2 * m1 / l1
    if eta1 <= 0 or eta2 <= 0:
        raise RegimeError(f"need eta1, eta2 > 0 (got {eta1:.6g}, {eta2:.6g})")
    a = 1.0 - eta2 / eta1
    repeated = abs(a) < REPEATED_TOL
    if not repeated and abs(a) < ILL_CONDITIONED_TOL:
        warnings.warn(f"nearly repeated spectrum (a = {a:.3g}); eigen-coordinate constants "
                      "are ill-conditioned", RuntimeWarning, stacklevel=2)
    L1 = (l1 + abs(l1 - l2)) * (eta1 + eta2) / eta1
    if repeated:
        b = a1 = math.inf
    else:
        b = (abs(a) + 1) / abs(a)
        a1 = b * b * (l1 + m1 + l2 + m2) / (2 * eta1)
    a2 = (l2 + m2) / (2 * eta2)
    return SpectralData(eta1, eta2, a, min(eta1, eta2), max(eta1, eta2), L1, b, a1, a2,
                        repeated)


def _spectral_nonrepeated(params: ModelParams) -> SpectralData:
    sd = eigen_decomposition(params)
    if sd.repeated:
        raise RegimeError("repeated spectrum (a = 0): eigen-coordinates undefined, "
                          "use the a = 0 envelopes")
    return sd


def to_eigen_coords(params: ModelParams, x) -> EigenState:
    sd = _spectral_nonrepeated(params)
    return EigenState(x[0] - params.fixed_point + x[1] / sd.a, x[1])


def from_eigen_coords(params: ModelParams, tx) -> FluidState:
    sd = _spectral_nonrepeated(params)
    return FluidState(tx[0] + params.fixed_point - tx[1] / sd.a, tx[1])


def hypothesis_radius(params: ModelParams, x) -> tuple[float, float]:
    """``(y0, limit)``: distance to the fixed point in the envelope norm and its admissible bound.

    Distinct eigenvalues: ``y0 = max(|tx1|, x2/|a|)`` against ``L/(8 L1)``.
    Repeated: ``y0 = max(|x1 - x1*|, x2)`` against ``eta1/(32 (lambda1 + lambda2))``.
    """
    sd = eigen_decomposition(params)
    if sd.repeated:
        y0 = max(abs(x[0] - params.fixed_point), x[1])
        return y0, sd.eta1 / (32 * (params.lambda1 + params.lambda2))
    tx1 = x[0] - params.fixed_point + x[1] / sd.a
    return max(abs(tx1), x[1] / abs(sd.a)), sd.L / (8 * sd.L1)


def decay_envelope(params: ModelParams, x0, t: float) -> Envelope:
    """Upper/lower bounds on the fluid solution at time ``t`` started from ``x0``.

    Raises :class:`InapplicableError` unless ``x0`` is close enough to the
    fixed point.  For a repeated spectrum ``tx1_abs_upper`` bounds
    ``|x1 - x1*|`` instead of the eigen-coordinate.
    """
    sd = eigen_decomposition(params)
    y0, limit = hypothesis_radius(params, x0)
    if y0 > limit:
        raise InapplicableError(f"start is outside the envelope hypothesis ({y0:.4g} > {limit:.4g})")
    x2 = x0[1]
    if sd.repeated:
        rate = sd.eta1
        return Envelope(4 * y0 * math.exp(-t * rate / 2), 2 * x2 * math.exp(-t * rate),
                        0.5 * x2 * math.exp(-t * rate), "repeated")
    return Envelope(2 * y0 * math.exp(-t * sd.L), 2 * x2 * math.exp(-t * sd.eta2),
                    0.5 * x2 * math.exp(-t * sd.eta2), "distinct")


def lyapunov_value(params: ModelParams, x) -> float:
    c = params.mu2 / params.lambda2 - params.mu1 / params.lambda1
    if c < 0:
        raise RegimeError("Lyapunov function needs R01 >= R02")
    s = x[0] + x[1] - 1 + params.mu1 / params.lambda1
    return 0.5 * s * s + x[1] * c


def _first_crossing(traj: FluidTrajectory, g, t_max: float, per_step: int = 16) -> float | None:
    """Earliest sampled time with ``g <= 0``, refined by bracketing root search."""
    knots = traj.t
    if knots.size < 2:
        return None
    fine = np.unique(np.concatenate([
        np.linspace(lo, hi, per_step, endpoint=False) for lo, hi in zip(knots[:-1], knots[1:])
    ] + [knots[-1:]]))
    fine = fine[fine <= t_max]
    values = np.array([g(traj(s)) for s in fine])
    hits = np.nonzero(values <= 0)[0]
    if hits.size == 0:
        return None
    k = hits[0]
    if k == 0:
        return 0.0
    return brentq(lambda s: g(traj(s)), fine[k - 1], fine[k], xtol=ROOT_XTOL)


def _search(params, x0, g, horizon, max_horizon, rel_tol):
    while horizon <= max_horizon:
        traj = integrate(params, x0, horizon, rel_tol=rel_tol)
        t = _first_crossing(traj, g, horizon)
        if t is not None:
            return t
        horizon *= 2
    return None


def burn_in_time(params: ModelParams, x0, rel_tol: float = 1e-10,
                 max_horizon: float = 1e5) -> float:
    """First time the fluid path enters the envelope hypothesis region."""
    x0 = FluidState(*map(float, x0)).check()
    sd = eigen_decomposition(params)
    if x0.x1 <= 0:
        raise NoConvergenceError("strain 1 absent: the exclusion fixed point is not reached")
    y0, limit = hypothesis_radius(params, x0)
    if y0 <= limit:
        return 0.0
    t = _search(params, x0, lambda x: hypothesis_radius(params, x)[0] - limit,
                10.0 / sd.L, max_horizon, rel_tol)
    if t is None:
        raise NoConvergenceError("hypothesis region not reached within max_horizon")
    return t


def crossing_time(params: ModelParams, x0, level: float, rel_tol: float = 1e-10,
                  max_horizon: float = 1e5) -> float:
    """First time ``x2`` falls to ``level`` along the fluid path from ``x0``."""
    x0 = FluidState(*map(float, x0)).check()
    if x0.x2 <= level:
        return 0.0
    if x0.x1 <= 0 and params.lambda2 > params.mu2:
        raise NoConvergenceError("strain 2 alone is supercritical and does not decay")
    sd = eigen_decomposition(params)
    t = _search(params, x0, lambda x: x[1] - level, 10.0 / sd.L, max_horizon, rel_tol)
    if t is None:
        raise NoConvergenceError(f"x2 did not fall to {level:g} within max_horizon")
    return t


def phase_time_tN(params: ModelParams, n: int, x_t0, rel_tol: float = 1e-10) -> float:
    """Time, measured from ``x_t0``, until ``x2`` first drops to ``N^(-1/4)``."""
    y0, limit = hypothesis_radius(params, x_t0)
    if y0 > limit:
        raise InapplicableError("x_t0 is outside the envelope hypothesis")
    return crossing_time(params, x_t0, n ** -0.25, rel_tol=rel_tol)


def phase_time_bracket(params: ModelParams, n: int, x_t0) -> tuple[float, float]:
    """Envelope-implied bounds ``(t_minus, t_plus)`` on :func:`phase_time_tN`."""
    sd = eigen_decomposition(params)
    rate = sd.eta1 if sd.repeated else sd.eta2
    q = x_t0[1] * n**0.25
    return max(0.0, math.log(q / 2) / rate), max(0.0, math.log(2 * q) / rate)


def phase1_bound(params: ModelParams, t0: float, delta: float, n: int) -> Phase1Bound:
    """Burn-in tracking certificate.

    With probability at least ``1 - probability_bound`` the scaled chain
    stays within ``deviation_bound`` (l1 norm) of the fluid path on
    ``[0, t0]``, given an initial gap of at most ``delta``.
    """
    l1 = params.lambda1
    if not t0 > 0:
        raise ValueError("t0 must be positive")
    if not 0 < delta <= math.log(4) * t0 * (l1 + 1):
        raise ValueError("delta must lie in (0, log(4) t0 (lambda1 + 1)]")
    dev = 2 * delta * math.exp((5 * l1 + 1) * t0)
    prob = 4 * math.exp(-delta * delta * n / (4 * t0 * (l1 + 1)))
    return Phase1Bound(dev, prob, prob >= 1)


def lt_approx_bound(params: ModelParams, n: int, omega: float) -> TrackingBound:
    """Long-horizon tracking certificate near the fixed point (distinct eigenvalues)."""
    sd = _spectral_nonrepeated(params)
    cap = 4 * math.log(2) ** 2 * n * min(sd.a1, sd.a2) / sd.b**2
    if not 0 < omega < cap:
        raise ValueError(f"omega must lie in (0, {cap:.6g})")
    dev = 8 * math.exp(sd.Ltilde) * math.sqrt(omega * (sd.a1 + sd.a2) / n)
    prob = 8 * math.exp(-omega / 8)
    return TrackingBound(dev, prob, math.ceil(math.exp(omega / 8)), prob >= 1)


def eigen_path(params: ModelParams, x0, t_end: float, dt: float, rel_tol: float = 1e-10):
    """Fluid eigen-coordinates sampled on ``0, dt, ..., >= t_end``; returns ``(grid, tx1, tx2)``."""
    sd = _spectral_nonrepeated(params)
    steps = int(math.ceil(t_end / dt))
    grid = np.arange(steps + 1) * dt
    traj = integrate(params, x0, grid[-1], rel_tol=rel_tol)
    x1, x2 = traj(grid)
    return grid, x1 - params.fixed_point + x2 / sd.a, x2
