import math

import numpy as np
import pytest
from scipy import stats as sps

from sis_competition.gillespie import (StopRule, _competition_lean, _competition_run,
                                       sample_extinction_times, sample_linear_bd,
                                       simulate_bd_sandwich, simulate_competition,
                                       simulate_coupled_domination, simulate_linear_bd)
from sis_competition.model import ChainState, ModelParams, transition_rates
from sis_competition.rng import SplitMix64, derive_seed

P = ModelParams(1.5, 1, 1.2, 1, n=50)


def replay(params, x1, x2, seed, max_events):
    """Independent pure-Python direct-method run on the reference stream."""
    g = SplitMix64(seed)
    n, inv_n, t = params.n, 1.0 / params.n, 0.0
    path = [(t, x1, x2)]
    for _ in range(max_events):
        if x2 == 0 or (x1 == 0 and x2 == 0):
            break
        sus = (n - x1 - x2) * inv_n
        up1, dn1, up2 = params.lambda1 * x1 * sus, params.mu1 * x1, params.lambda2 * x2 * sus
        total = up1 + dn1 + up2 + params.mu2 * x2
        u = ((g.next_u64() >> 11) + 0.5) * 2.0**-53
        t += -math.log(u) / total
        v = g.random() * total
        if v < up1:
            x1 += 1
        elif v < up1 + dn1:
            x1 -= 1
        elif v < up1 + dn1 + up2:
            x2 += 1
        else:
            x2 -= 1
        path.append((t, x1, x2))
    return path


@pytest.mark.parametrize("seed", [0, 1, 2**63 + 5])
def test_matches_reference_replay(seed):
    sample, traj = simulate_competition(P, ChainState(15, 15), seed, record=True)
    path = replay(P, 15, 15, seed, 10**6)
    assert traj.times.tolist() == [p[0] for p in path]
    assert traj.x1.tolist() == [p[1] for p in path]
    assert traj.x2.tolist() == [p[2] for p in path]
    assert sample.kappa == path[-1][0] and not sample.kappa_censored


def test_trajectory_shape_and_determinism():
    a = simulate_competition(P, ChainState(20, 10), 99, StopRule(stop_on_kappa=False,
                                                                 max_time=50.0), record=True)
    b = simulate_competition(P, ChainState(20, 10), 99, StopRule(stop_on_kappa=False,
                                                                 max_time=50.0), record=True)
    assert a[0] == b[0]
    for f in ("times", "x1", "x2"):
        assert np.array_equal(getattr(a[1], f), getattr(b[1], f))
    tr = a[1]
    assert np.all(np.diff(tr.times) > 0)
    steps = np.abs(np.diff(tr.x1)) + np.abs(np.diff(tr.x2))
    assert np.all(steps == 1)


def test_thinned_recording_keeps_exact_times():
    full, _ = simulate_competition(P, ChainState(15, 15), 5, record=True)
    thin, tr = simulate_competition(P, ChainState(15, 15), 5, record=True, stride=7)
    assert full == thin
    assert tr.times[0] == 0 and tr.times[-1] == thin.kappa


@pytest.mark.parametrize("stop_on_kappa", [True, False])
@pytest.mark.parametrize("seed", range(5))
def test_lean_kernel_equals_recording_kernel(seed, stop_on_kappa):
    args = (P.lambda1, P.mu1, P.lambda2, P.mu2, P.n, 12, 8, np.uint64(seed), 10**6, 200.0,
            stop_on_kappa, True)
    full = _competition_run(*args, False, 1)
    assert _competition_lean(*args) == full[:5]


def test_strain_two_absent():
    sample, _ = simulate_competition(P, ChainState(10, 0), 3)
    assert sample.kappa == 0.0 and sample.events == 0


def test_caps_censor():
    s, _ = simulate_competition(P, ChainState(25, 20), 1, StopRule(max_events=10))
    assert s.events == 10 and s.kappa_censored and s.tau_censored
    s, _ = simulate_competition(P, ChainState(25, 20), 1, StopRule(max_time=0.01))
    assert s.kappa_censored and s.kappa == 0.01


def test_absorption_sets_both_times():
    p = ModelParams(0.5, 1, 0.4, 1, n=30)
    s, _ = simulate_competition(p, ChainState(10, 10), 4, StopRule(stop_on_kappa=False))
    assert not s.kappa_censored and not s.tau_censored
    assert s.events > 0 and max(s.kappa, s.tau) > 0


def test_next_event_proportions():
    # one step from a fixed state, many seeds: chi-square against the rate quad
    p = ModelParams(1.5, 1, 1.2, 1, n=10)
    state = ChainState(3, 2)
    rates = np.array(transition_rates(p, state))
    counts = np.zeros(4)
    first = []
    for seed in range(20_000):
        _, tr = simulate_competition(p, state, derive_seed(11, seed),
                                     StopRule(max_events=1), record=True)
        dx1, dx2 = tr.x1[-1] - 3, tr.x2[-1] - 2
        counts[{(1, 0): 0, (-1, 0): 1, (0, 1): 2, (0, -1): 3}[(dx1, dx2)]] += 1
        first.append(tr.times[-1])
    expected = rates / rates.sum() * counts.sum()
    assert sps.chisquare(counts, expected).pvalue > 1e-3
    assert sps.kstest(first, "expon", args=(0, 1 / rates.sum())).pvalue > 1e-3


def test_batch_schedule_independent():
    p = P.with_n(400)
    init = ChainState(120, 120)
    serial = sample_extinction_times(p, init, 2024, 16, workers=1)
    parallel = sample_extinction_times(p, init, 2024, 16, workers=8)
    assert serial == parallel


def test_batch_single_equals_direct():
    p = P.with_n(400)
    (batch,) = sample_extinction_times(p, ChainState(120, 120), 77, 1)
    direct, _ = simulate_competition(p, ChainState(120, 120), derive_seed(77, 0))
    assert batch == direct


def test_mean_kappa_moderate_n():
    p = ModelParams(1.5, 1, 1.2, 1, 5000)
    ks = [s.kappa for s in sample_extinction_times(p, ChainState(1500, 1500), 3, 300)]
    # law mean 31.83, sd 6.4: a 300-sample mean is within 1.2 with overwhelming probability
    assert abs(np.mean(ks) - 31.83) < 1.2


def test_pure_death_mean():
    t, cens, _ = sample_linear_bd(0.0, 1.0, 1, 5, 10_000)
    assert not cens.any()
    assert abs(t.mean() - 1.0) < 0.03


def test_linear_bd_determinism_and_zero_start():
    assert simulate_linear_bd(0.8, 1, 100, 9) == simulate_linear_bd(0.8, 1, 100, 9)
    assert simulate_linear_bd(0.8, 1, 0, 9) == (0.0, False, 0)
    with pytest.raises(ValueError):
        simulate_linear_bd(0.8, 0, 1, 9)


@pytest.mark.parametrize("l1, l2", [(1.5, 1.2), (2.0, 2.0), (1.3, 0.7)])
def test_domination_ordering(l1, l2):
    p = ModelParams(l1, 1, l2, 1, n=500)
    for seed in range(5):
        c = simulate_coupled_domination(p, ChainState(100, 100), seed)
        assert c.violations == 0
        assert np.all(c.lower <= c.middle) and np.all(c.middle <= c.upper)


def test_domination_lower_at_zero():
    c = simulate_coupled_domination(P.with_n(500), ChainState(100, 100), 1, lower0=0)
    assert np.all(c.lower == 0) and c.violations == 0


def test_domination_preconditions():
    with pytest.raises(ValueError):
        simulate_coupled_domination(P.with_n(500), ChainState(100, 100), 1, lower0=300)
    with pytest.raises(ValueError):
        simulate_coupled_domination(ModelParams(1.5, 1, 1.2, 0.9, 500), ChainState(1, 1), 1)


def _entry(n):
    return ChainState(n // 3, int(math.floor(n**0.75)))


def test_sandwich_orders_until_band_exit():
    p = ModelParams(1.5, 1, 1.2, 1, 10**5)
    c = simulate_bd_sandwich(p, _entry(p.n), 0.24, 1, stride=1000)
    assert c.violations == 0
    assert c.middle[-1] == 0
    window = c.times < c.band_exit_time
    assert np.all(c.lower[window] <= c.middle[window])
    assert np.all(c.middle[window] <= c.upper[window])


def test_sandwich_lower_from_zero():
    p = ModelParams(1.5, 1, 1.2, 1, 10**5)
    c = simulate_bd_sandwich(p, _entry(p.n), 0.24, 2, StopRule(max_time=5.0), lower0=0,
                             stride=1000)
    assert c.violations == 0 and np.all(c.lower == 0)


@pytest.mark.parametrize("eps", [0.0, 0.25, 0.3])
def test_sandwich_eps_range(eps):
    p = ModelParams(1.5, 1, 1.2, 1, 10**5)
    with pytest.raises(ValueError):
        simulate_bd_sandwich(p, _entry(p.n), eps, 1)


def test_sandwich_rejects_far_start():
    p = ModelParams(1.5, 1, 1.2, 1, 10**5)
    with pytest.raises(ValueError):
        simulate_bd_sandwich(p, ChainState(10_000, 5_000), 0.24, 1)
