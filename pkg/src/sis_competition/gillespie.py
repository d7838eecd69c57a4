"""Exact event-driven simulation (direct SSA) of the competition chain and its couplings.

Every kernel draws the holding time as ``-log(U)`` with ``U`` uniform on the
open unit interval and picks the event with a second uniform scaled by the
total rate.  All randomness comes from :mod:`sis_competition.rng`, so a run is
a pure function of its inputs and seed.

Batch entry points split the replicate range into chunks and run them on a
thread pool; the compiled kernels release the GIL and write into preallocated
per-replicate slots, so the result never depends on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from numba import njit

from .model import ChainState, ModelParams
from .rng import advance, derive_seed, derive_seeds, mix64, to_unit

_INV53 = 1.0 / 9007199254740992.0


@dataclass(frozen=True)
class StopRule:
    max_events: int = 10**9
    max_time: float = 1e7
    stop_on_kappa: bool = True
    stop_on_absorption: bool = True

    def __post_init__(self):
        if self.max_events < 1:
            raise ValueError("max_events must be at least 1")
        if not self.max_time > 0:
            raise ValueError("max_time must be positive")


@dataclass(frozen=True)
class ExtinctionSample:
    """One replicate.  A censored time holds the time the run stopped (a lower bound)."""

    kappa: float
    tau: float
    events: int
    seed: int
    kappa_censored: bool = False
    tau_censored: bool = False


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    stride: int = 1

    def __len__(self):
        return len(self.times)


class BdOutcome(NamedTuple):
    time: float
    censored: bool
    events: int


@dataclass(frozen=True)
class CoupledPaths:
    """Three coupled counts recorded at event instants.

    ``lower <= middle <= upper`` is checked inside the kernel after every
    event; ``violations`` counts failures (over the validity window only,
    for the birth-death sandwich).
    """

    times: np.ndarray
    lower: np.ndarray
    middle: np.ndarray
    upper: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    violations: int
    events: int
    band_exit_time: float = math.inf

    @property
    def band_valid(self) -> bool:
        return math.isinf(self.band_exit_time)


# --------------------------------------------------------------------------
# compiled kernels

@njit(inline="always")
def _exp_draw(state):
    state = advance(state)
    u = (np.int64(mix64(state) >> np.uint64(11)) + 0.5) * _INV53
    return state, -math.log(u)


@njit(inline="always")
def _unit_draw(state):
    state = advance(state)
    return state, to_unit(mix64(state))


@njit(inline="always")
def _grow(buf, k):
    if k < buf.shape[0]:
        return buf
    out = np.empty(2 * buf.shape[0], dtype=buf.dtype)
    out[:k] = buf[:k]
    return out


@njit(nogil=True, cache=True)
def _competition_run(l1, m1, l2, m2, n, x1, x2, seed, max_events, max_time,
                     stop_on_kappa, stop_on_absorption, record, stride):
    state = np.uint64(seed)
    inv_n = 1.0 / n
    t = 0.0
    events = 0
    kappa = 0.0 if x2 == 0 else -1.0
    tau = 0.0 if x1 == 0 else -1.0
    cap = 1024 if record else 1
    tt = np.empty(cap)
    r1 = np.empty(cap, dtype=np.int64)
    r2 = np.empty(cap, dtype=np.int64)
    k = 0
    if record:
        tt[0] = 0.0
        r1[0] = x1
        r2[0] = x2
        k = 1
    last_recorded = 0
    while events < max_events:
        if stop_on_kappa and kappa >= 0.0:
            break
        if x1 == 0 and x2 == 0:
            break
        sus = (n - x1 - x2) * inv_n
        up1 = l1 * x1 * sus
        dn1 = m1 * x1
        up2 = l2 * x2 * sus
        total = up1 + dn1 + up2 + m2 * x2
        state, e = _exp_draw(state)
        dt = e / total
        if t + dt > max_time:
            t = max_time
            break
        t += dt
        state, v = _unit_draw(state)
        v *= total
        if v < up1:
            x1 += 1
        elif v < up1 + dn1:
            x1 -= 1
            if x1 == 0 and tau < 0.0:
                tau = t
        elif v < up1 + dn1 + up2:
            x2 += 1
        else:
            x2 -= 1
            if x2 == 0 and kappa < 0.0:
                kappa = t
        events += 1
        if record and events % stride == 0:
            tt = _grow(tt, k)
            r1 = _grow(r1, k)
            r2 = _grow(r2, k)
            tt[k] = t
            r1[k] = x1
            r2[k] = x2
            k += 1
            last_recorded = events
        if stop_on_absorption and x1 == 0 and x2 == 0:
            break
    if record and last_recorded != events:
        tt = _grow(tt, k)
        r1 = _grow(r1, k)
        r2 = _grow(r2, k)
        tt[k] = t
        r1[k] = x1
        r2[k] = x2
        k += 1
    kappa_cens = kappa < 0.0
    tau_cens = tau < 0.0
    if kappa_cens:
        kappa = t
    if tau_cens:
        tau = t
    return kappa, kappa_cens, tau, tau_cens, events, tt[:k], r1[:k], r2[:k]


@njit(nogil=True, cache=True)
def _competition_lean(l1, m1, l2, m2, n, x1, x2, seed, max_events, max_time,
                      stop_on_kappa, stop_on_absorption):
    # same draws as _competition_run without trajectory bookkeeping
    state = np.uint64(seed)
    inv_n = 1.0 / n
    t = 0.0
    events = 0
    kappa = 0.0 if x2 == 0 else -1.0
    tau = 0.0 if x1 == 0 else -1.0
    while events < max_events:
        if x2 == 0:
            if kappa < 0.0:
                kappa = t
            if stop_on_kappa or x1 == 0:
                break
        elif x1 == 0:
            if tau < 0.0:
                tau = t
        sus = (n - x1 - x2) * inv_n
        up1 = l1 * x1 * sus
        dn1 = m1 * x1
        up2 = l2 * x2 * sus
        total = up1 + dn1 + up2 + m2 * x2
        state, e = _exp_draw(state)
        t_next = t + e / total
        if t_next > max_time:
            t = max_time
            break
        t = t_next
        state, v = _unit_draw(state)
        v *= total
        if v < up1:
            x1 += 1
        elif v < up1 + dn1:
            x1 -= 1
        elif v < up1 + dn1 + up2:
            x2 += 1
        else:
            x2 -= 1
        events += 1
    if x1 == 0 and tau < 0.0:
        tau = t
    if x2 == 0 and kappa < 0.0:
        kappa = t
    kappa_cens = kappa < 0.0
    tau_cens = tau < 0.0
    if kappa_cens:
        kappa = t
    if tau_cens:
        tau = t
    return kappa, kappa_cens, tau, tau_cens, events


@njit(nogil=True, cache=True)
def _competition_batch(l1, m1, l2, m2, n, x1, x2, seeds, lo, hi, max_events, max_time,
                       stop_on_kappa, stop_on_absorption,
                       kappa, kappa_cens, tau, tau_cens, events):
    for i in range(lo, hi):
        res = _competition_lean(l1, m1, l2, m2, n, x1, x2, seeds[i], max_events, max_time,
                                stop_on_kappa, stop_on_absorption)
        kappa[i] = res[0]
        kappa_cens[i] = res[1]
        tau[i] = res[2]
        tau_cens[i] = res[3]
        events[i] = res[4]


@njit(nogil=True, cache=True)
def _linear_bd_run(lam, mu, y, seed, max_events, max_time):
    state = np.uint64(seed)
    t = 0.0
    events = 0
    p_birth = lam / (lam + mu)
    rate = lam + mu
    while y > 0 and events < max_events:
        state, e = _exp_draw(state)
        dt = e / (rate * y)
        if t + dt > max_time:
            return max_time, True, events
        t += dt
        state, v = _unit_draw(state)
        if v < p_birth:
            y += 1
        else:
            y -= 1
        events += 1
    return t, y > 0, events


@njit(nogil=True, cache=True)
def _linear_bd_batch(lam, mu, y0, seeds, lo, hi, max_events, max_time, times, cens, events):
    for i in range(lo, hi):
        res = _linear_bd_run(lam, mu, y0, seeds[i], max_events, max_time)
        times[i] = res[0]
        cens[i] = res[1]
        events[i] = res[2]


@njit(nogil=True, cache=True)
def _domination_run(l1, l2, mu, n, x1, x2, y, z, seed, max_events, max_time, stride):
    # comonotone coupling: one uniform level per up (down) event moves every
    # chain whose own rate exceeds it, so equal states move together
    state = np.uint64(seed)
    inv_n = 1.0 / n
    t = 0.0
    events = 0
    violations = 0
    cap = 1024
    tt = np.empty(cap)
    ry = np.empty(cap, dtype=np.int64)
    r1 = np.empty(cap, dtype=np.int64)
    r2 = np.empty(cap, dtype=np.int64)
    rz = np.empty(cap, dtype=np.int64)
    tt[0] = 0.0
    ry[0] = y
    r1[0] = x1
    r2[0] = x2
    rz[0] = z
    k = 1
    last_recorded = 0
    while events < max_events and (y > 0 or x1 + x2 > 0 or z > 0):
        s = x1 + x2
        up_y = l2 * y * (n - y) * inv_n
        up_s1 = l1 * x1 * (n - s) * inv_n
        up_s = up_s1 + l2 * x2 * (n - s) * inv_n
        up_z = l1 * z * (n - z) * inv_n
        up_max = max(up_y, max(up_s, up_z))
        dn_max = mu * max(y, max(s, z))
        total = up_max + dn_max
        state, e = _exp_draw(state)
        dt = e / total
        if t + dt > max_time:
            t = max_time
            break
        t += dt
        state, v = _unit_draw(state)
        v *= total
        if v < up_max:
            if v < up_y:
                y += 1
            if v < up_s:
                if v < up_s1:
                    x1 += 1
                else:
                    x2 += 1
            if v < up_z:
                z += 1
        else:
            w = v - up_max
            if w < mu * y:
                y -= 1
            if w < mu * s:
                if w < mu * x1:
                    x1 -= 1
                else:
                    x2 -= 1
            if w < mu * z:
                z -= 1
        events += 1
        s = x1 + x2
        if y > s or s > z:
            violations += 1
        if events % stride == 0:
            tt = _grow(tt, k)
            ry = _grow(ry, k)
            r1 = _grow(r1, k)
            r2 = _grow(r2, k)
            rz = _grow(rz, k)
            tt[k] = t
            ry[k] = y
            r1[k] = x1
            r2[k] = x2
            rz[k] = z
            k += 1
            last_recorded = events
    if last_recorded != events:
        tt = _grow(tt, k)
        ry = _grow(ry, k)
        r1 = _grow(r1, k)
        r2 = _grow(r2, k)
        rz = _grow(rz, k)
        tt[k] = t
        ry[k] = y
        r1[k] = x1
        r2[k] = x2
        rz[k] = z
        k += 1
    return tt[:k], ry[:k], r1[:k], r2[:k], rz[:k], violations, events


@njit(nogil=True, cache=True)
def _sandwich_run(l1, m1, l2, m2, n, x1, x2, w, z, birth_w, birth_z, x1_lo, x1_hi, x2_hi,
                  seed, max_events, max_time, stride):
    state = np.uint64(seed)
    inv_n = 1.0 / n
    t = 0.0
    events = 0
    violations = 0
    exit_time = -1.0
    if x1 < x1_lo or x1 > x1_hi or x2 > x2_hi:
        exit_time = 0.0
    cap = 1024
    tt = np.empty(cap)
    rw = np.empty(cap, dtype=np.int64)
    r1 = np.empty(cap, dtype=np.int64)
    r2 = np.empty(cap, dtype=np.int64)
    rz = np.empty(cap, dtype=np.int64)
    tt[0] = 0.0
    rw[0] = w
    r1[0] = x1
    r2[0] = x2
    rz[0] = z
    k = 1
    tracked_moves = 0
    last_recorded = 0
    while events < max_events and (w > 0 or x2 > 0):
        sus = (n - x1 - x2) * inv_n
        up1 = l1 * x1 * sus
        dn1 = m1 * x1
        up_w = birth_w * w
        up_x = l2 * sus * x2
        up_z = birth_z * z
        up_max = max(up_w, max(up_x, up_z))
        dn_max = m2 * max(w, max(x2, z))
        total = up1 + dn1 + up_max + dn_max
        state, e = _exp_draw(state)
        dt = e / total
        if t + dt > max_time:
            t = max_time
            break
        t += dt
        state, v = _unit_draw(state)
        v *= total
        moved = True
        if v < up1:
            x1 += 1
            moved = False
        elif v < up1 + dn1:
            x1 -= 1
            moved = False
        else:
            v -= up1 + dn1
            if v < up_max:
                if v < up_w:
                    w += 1
                if v < up_x:
                    x2 += 1
                if v < up_z:
                    z += 1
            else:
                v -= up_max
                if v < m2 * w:
                    w -= 1
                if v < m2 * x2:
                    x2 -= 1
                if v < m2 * z:
                    z -= 1
        events += 1
        if exit_time < 0.0 and (x1 < x1_lo or x1 > x1_hi or x2 > x2_hi):
            exit_time = t
        if exit_time < 0.0 and (w > x2 or x2 > z):
            violations += 1
        if moved:
            tracked_moves += 1
            if tracked_moves % stride == 0:
                tt = _grow(tt, k)
                rw = _grow(rw, k)
                r1 = _grow(r1, k)
                r2 = _grow(r2, k)
                rz = _grow(rz, k)
                tt[k] = t
                rw[k] = w
                r1[k] = x1
                r2[k] = x2
                rz[k] = z
                k += 1
                last_recorded = tracked_moves
    if last_recorded != tracked_moves:
        tt = _grow(tt, k)
        rw = _grow(rw, k)
        r1 = _grow(r1, k)
        r2 = _grow(r2, k)
        rz = _grow(rz, k)
        tt[k] = t
        rw[k] = w
        r1[k] = x1
        r2[k] = x2
        rz[k] = z
        k += 1
    return tt[:k], rw[:k], r1[:k], r2[:k], rz[:k], violations, events, exit_time


@njit(nogil=True, cache=True)
def _tracking_run(l1, m1, l2, m2, n, x1, x2, seed, horizon, grid_dt, det_tx1, det_tx2,
                  fixed, a):
    # sup over [0, horizon] of max(|tx1_N - tx1|, |tx2_N - tx2|/|a|), with the
    # deterministic eigen-coordinates linearly interpolated on a uniform grid
    state = np.uint64(seed)
    inv_n = 1.0 / n
    inv_a = 1.0 / a
    abs_a = abs(a)
    t = 0.0
    events = 0
    sup = abs(x1 * inv_n - fixed + x2 * inv_n * inv_a - det_tx1[0])
    sup = max(sup, abs(x2 * inv_n - det_tx2[0]) / abs_a)
    last = det_tx1.shape[0] - 1
    while x1 + x2 > 0:
        sus = (n - x1 - x2) * inv_n
        up1 = l1 * x1 * sus
        dn1 = m1 * x1
        up2 = l2 * x2 * sus
        total = up1 + dn1 + up2 + m2 * x2
        state, e = _exp_draw(state)
        t_next = t + e / total
        stop = t_next >= horizon
        if stop:
            t_next = horizon
        pos = t_next / grid_dt
        j = min(int(pos), last - 1)
        f = pos - j
        d1 = det_tx1[j] + f * (det_tx1[j + 1] - det_tx1[j])
        d2 = det_tx2[j] + f * (det_tx2[j + 1] - det_tx2[j])
        n1 = x1 * inv_n - fixed + x2 * inv_n * inv_a
        n2 = x2 * inv_n
        sup = max(sup, max(abs(n1 - d1), abs(n2 - d2) / abs_a))
        if stop:
            break
        t = t_next
        state, v = _unit_draw(state)
        v *= total
        if v < up1:
            x1 += 1
        elif v < up1 + dn1:
            x1 -= 1
        elif v < up1 + dn1 + up2:
            x2 += 1
        else:
            x2 -= 1
        events += 1
        n1 = x1 * inv_n - fixed + x2 * inv_n * inv_a
        n2 = x2 * inv_n
        sup = max(sup, max(abs(n1 - d1), abs(n2 - d2) / abs_a))
    return sup, events


# --------------------------------------------------------------------------
# batch plumbing

def default_workers() -> int:
    return os.cpu_count() or 1


def _run_chunks(kernel: Callable[[int, int], None], count: int, workers: Optional[int]) -> None:
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if workers == 1 or count <= 1:
        kernel(0, count)
        return
    n_chunks = min(count, 4 * workers)
    bounds = np.linspace(0, count, n_chunks + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(kernel, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        for fut in futures:
            fut.result()


# --------------------------------------------------------------------------
# public API

def simulate_competition(params: ModelParams, init: ChainState, seed: int,
                         stop: StopRule = StopRule(), record: bool = False,
                         stride: int = 1) -> tuple[ExtinctionSample, Optional[Trajectory]]:
    """Run the two-strain chain from ``init`` until the stop rule fires.

    With ``record=True`` the state after every ``stride``-th event is kept
    (plus the initial and final states); extinction times are exact either way.
    """
    init.check(params.n)
    if stride < 1:
        raise ValueError("stride must be at least 1")
    res = _competition_run(params.lambda1, params.mu1, params.lambda2, params.mu2, params.n,
                           init.x1, init.x2, np.uint64(seed), stop.max_events,
                           float(stop.max_time), stop.stop_on_kappa, stop.stop_on_absorption,
                           record, stride)
    kappa, kcens, tau, tcens, events, tt, r1, r2 = res
    sample = ExtinctionSample(float(kappa), float(tau), int(events), int(seed),
                              bool(kcens), bool(tcens))
    traj = Trajectory(tt, r1, r2, stride) if record else None
    return sample, traj


def sample_extinction_times(params: ModelParams, init: ChainState, master_seed: int,
                            replicates: int, stop: StopRule = StopRule(),
                            workers: Optional[int] = None) -> list[ExtinctionSample]:
    """Independent replicates; replicate ``i`` is seeded with ``derive_seed(master_seed, i)``."""
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    init.check(params.n)
    seeds = derive_seeds(master_seed, replicates)
    kappa = np.empty(replicates)
    tau = np.empty(replicates)
    kcens = np.empty(replicates, dtype=np.bool_)
    tcens = np.empty(replicates, dtype=np.bool_)
    events = np.empty(replicates, dtype=np.int64)

    def chunk(lo, hi):
        _competition_batch(params.lambda1, params.mu1, params.lambda2, params.mu2, params.n,
                           init.x1, init.x2, seeds, lo, hi, stop.max_events,
                           float(stop.max_time), stop.stop_on_kappa, stop.stop_on_absorption,
                           kappa, kcens, tau, tcens, events)

    _run_chunks(chunk, replicates, workers)
    return [
        ExtinctionSample(float(kappa[i]), float(tau[i]), int(events[i]), int(seeds[i]),
                         bool(kcens[i]), bool(tcens[i]))
        for i in range(replicates)
    ]


def _check_bd(lam, mu, y0):
    if lam < 0 or not mu > 0:
        raise ValueError(f"need birth rate >= 0 and death rate > 0, got ({lam}, {mu})")
    if y0 < 0 or int(y0) != y0:
        raise ValueError(f"initial count must be a nonnegative integer, got {y0}")


def simulate_linear_bd(lam: float, mu: float, y0: int, seed: int,
                       stop: StopRule = StopRule()) -> BdOutcome:
    """Linear birth-death chain with per-head rates ``lam`` and ``mu``; time to hit 0."""
    _check_bd(lam, mu, y0)
    t, cens, ev = _linear_bd_run(float(lam), float(mu), int(y0), np.uint64(seed),
                                 stop.max_events, float(stop.max_time))
    return BdOutcome(float(t), bool(cens), int(ev))


def sample_linear_bd(lam: float, mu: float, y0: int, master_seed: int, replicates: int,
                     stop: StopRule = StopRule(), workers: Optional[int] = None):
    """Batch of :func:`simulate_linear_bd`; returns ``(times, censored, events)`` arrays."""
    _check_bd(lam, mu, y0)
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    seeds = derive_seeds(master_seed, replicates)
    times = np.empty(replicates)
    cens = np.empty(replicates, dtype=np.bool_)
    events = np.empty(replicates, dtype=np.int64)

    def chunk(lo, hi):
        _linear_bd_batch(float(lam), float(mu), int(y0), seeds, lo, hi, stop.max_events,
                         float(stop.max_time), times, cens, events)

    _run_chunks(chunk, replicates, workers)
    return times, cens, events


def simulate_coupled_domination(params: ModelParams, init: ChainState, seed: int,
                                stop: StopRule = StopRule(max_time=100.0),
                                lower0: Optional[int] = None, upper0: Optional[int] = None,
                                stride: int = 1) -> CoupledPaths:
    """Couple the total infective count with single-strain SIS chains below and above it.

    The lower chain infects at ``lambda2``, the upper at ``lambda1``; all three
    share the common recovery rate ``mu1 = mu2``.  Both bounding chains start at
    ``x1 + x2`` unless given.  Returned ``lower``/``middle``/``upper`` are the
    lower chain, ``x1 + x2`` and the upper chain.
    """
    init.check(params.n)
    if params.mu1 != params.mu2:
        raise ValueError("domination coupling needs equal recovery rates mu1 == mu2")
    if params.lambda1 < params.lambda2:
        raise ValueError("domination coupling needs lambda1 >= lambda2")
    total = init.x1 + init.x2
    lower0 = total if lower0 is None else int(lower0)
    upper0 = total if upper0 is None else int(upper0)
    if not (0 <= lower0 <= total <= upper0 <= params.n):
        raise ValueError(f"need 0 <= lower0 <= x1+x2 <= upper0 <= n, got ({lower0}, {total}, {upper0})")
    tt, ry, r1, r2, rz, viol, ev = _domination_run(
        params.lambda1, params.lambda2, params.mu1, params.n, init.x1, init.x2, lower0, upper0,
        np.uint64(seed), stop.max_events, float(stop.max_time), stride)
    return CoupledPaths(tt, ry, r1 + r2, rz, r1, r2, int(viol), int(ev))


def sandwich_birth_rates(params: ModelParams, eps: float) -> tuple[float, float]:
    """Per-head birth rates of the lower and upper linear chains of the final phase."""
    base = params.lambda2 * params.mu1 / params.lambda1
    slack = params.lambda2 * params.n ** (-eps)
    return base - 6 * slack, base + 5 * slack


def simulate_bd_sandwich(params: ModelParams, init: ChainState, eps: float, seed: int,
                         stop: StopRule = StopRule(), lower0: Optional[int] = None,
                         upper0: Optional[int] = None, stride: int = 1) -> CoupledPaths:
    """Sandwich the weaker strain between two linear birth-death chains.

    While ``x1`` stays within ``5 N^-eps`` of its endemic level and
    ``x2 <= N^-eps`` (the validity band), the coupling keeps
    ``lower <= X2 <= upper``.  ``band_exit_time`` is when the band was first
    left (``inf`` if never); violations are only counted before it.  The run
    ends when both ``X2`` and the lower chain are extinct; at moderate ``N``
    the upper chain can be supercritical and need not die out.
    """
    n = params.n
    init.check(n)
    if not 0 < eps < 0.25:
        raise ValueError(f"eps must lie in (0, 1/4), got {eps}")
    fixed = params.fixed_point
    if not params.lambda1 > params.mu1:
        raise ValueError("strain 1 must be supercritical")
    if abs(init.x1 / n - fixed) > n ** (-eps):
        raise ValueError("x1 is not within N^-eps of the endemic level")
    birth_w, birth_z = sandwich_birth_rates(params, eps)
    if birth_w < 0:
        raise ValueError(f"lower chain birth rate is negative ({birth_w}); N too small for eps")
    lower0 = int(math.floor(n**0.75 - n ** (2 / 3))) if lower0 is None else int(lower0)
    upper0 = int(math.ceil(n**0.75 + n ** (2 / 3))) if upper0 is None else int(upper0)
    if not 0 <= lower0 <= init.x2 <= upper0:
        raise ValueError(f"need lower0 <= x2 <= upper0, got ({lower0}, {init.x2}, {upper0})")
    band = 5 * n ** (-eps)
    x1_lo = (fixed - band) * n
    x1_hi = (fixed + band) * n
    x2_hi = n ** (1 - eps)
    tt, rw, r1, r2, rz, viol, ev, exit_time = _sandwich_run(
        params.lambda1, params.mu1, params.lambda2, params.mu2, n, init.x1, init.x2,
        lower0, upper0, birth_w, birth_z, x1_lo, x1_hi, x2_hi, np.uint64(seed),
        stop.max_events, float(stop.max_time), stride)
    exit_time = math.inf if exit_time < 0 else float(exit_time)
    return CoupledPaths(tt, rw, r2, rz, r1, r2, int(viol), int(ev), exit_time)


def tracking_deviation(params: ModelParams, init: ChainState, seed: int, horizon: float,
                       det_tx1: np.ndarray, det_tx2: np.ndarray, grid_dt: float,
                       a: float) -> tuple[float, int]:
    """Sup over ``[0, horizon]`` of the eigen-coordinate deviation from a deterministic path.

    ``det_tx1``/``det_tx2`` sample the deterministic eigen-coordinates on the
    grid ``0, grid_dt, 2*grid_dt, ...`` covering the horizon.
    """
    init.check(params.n)
    if len(det_tx1) < 2 or (len(det_tx1) - 1) * grid_dt < horizon * (1 - 1e-12):
        raise ValueError("deterministic grid does not cover the horizon")
    sup, ev = _tracking_run(params.lambda1, params.mu1, params.lambda2, params.mu2, params.n,
                            init.x1, init.x2, np.uint64(seed), float(horizon), float(grid_dt),
                            np.ascontiguousarray(det_tx1, dtype=float),
                            np.ascontiguousarray(det_tx2, dtype=float),
                            params.fixed_point, float(a))
    return float(sup), int(ev)


def sample_tracking_deviation(params: ModelParams, init: ChainState, master_seed: int,
                              replicates: int, horizon: float, det_tx1: np.ndarray,
                              det_tx2: np.ndarray, grid_dt: float, a: float,
                              workers: Optional[int] = None) -> np.ndarray:
    seeds = derive_seeds(master_seed, replicates)
    out = np.empty(replicates)

    def chunk(lo, hi):
        for i in range(lo, hi):
            out[i] = tracking_deviation(params, init, int(seeds[i]), horizon, det_tx1, det_tx2,
                                        grid_dt, a)[0]

    _run_chunks(chunk, replicates, workers)
    return out


__all__ = [
    "StopRule", "ExtinctionSample", "Trajectory", "BdOutcome", "CoupledPaths",
    "simulate_competition", "sample_extinction_times", "simulate_linear_bd",
    "sample_linear_bd", "simulate_coupled_domination", "simulate_bd_sandwich",
    "sandwich_birth_rates", "tracking_deviation", "sample_tracking_deviation",
    "derive_seed", "default_workers",
]
