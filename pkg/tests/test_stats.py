import math

import numpy as np
import pytest
from scipy import stats as sps

from sis_competition.laws import STANDARD_GUMBEL, EULER_GAMMA, ExponentialLaw, GumbelLaw
from sis_competition.stats import (SampleSet, gumbel_fit_moments, kolmogorov_critical,
                                   ks_distance, standardize, summary_stats)


def test_ks_single_point():
    assert ks_distance(SampleSet([0.0]), STANDARD_GUMBEL) == pytest.approx(1 - math.exp(-1))


def test_ks_at_median():
    law = GumbelLaw(2.0, 3.0)
    med = float(law.quantile(0.5))
    assert ks_distance(SampleSet([med] * 10), law) == pytest.approx(0.5, abs=1e-12)


def test_ks_agrees_with_scipy():
    rng = np.random.default_rng(3)
    x = rng.gumbel(0.3, 1.2, 500)
    ours = ks_distance(SampleSet(x), STANDARD_GUMBEL)
    assert ours == pytest.approx(sps.kstest(x, sps.gumbel_r.cdf).statistic, abs=1e-12)


def test_ks_self_sample_small():
    x = GumbelLaw(0, 1).sample(np.random.default_rng(1), 1000)
    assert ks_distance(SampleSet(x), STANDARD_GUMBEL) <= 0.061


def test_ks_affine_invariance():
    x = np.random.default_rng(2).exponential(2.0, 300)
    a = ks_distance(SampleSet(x), ExponentialLaw(2.0))
    scaled = GumbelLaw(5.0, 3.0)
    y = np.random.default_rng(2).gumbel(0, 1, 300)
    b = ks_distance(SampleSet(y), STANDARD_GUMBEL)
    c = ks_distance(SampleSet(5.0 + 3.0 * y), scaled)
    assert b == pytest.approx(c, abs=1e-12) and a > 0


def test_ks_empty():
    with pytest.raises(ValueError):
        ks_distance(SampleSet([]), STANDARD_GUMBEL)


def test_censored_excluded():
    s = SampleSet.from_samples([1.0, 2.0, 99.0], [False, False, True])
    assert s.values.tolist() == [1.0, 2.0] and s.censored_count == 1
    with pytest.raises(ValueError):
        SampleSet([1.0, math.inf])
    assert summary_stats(s).censored_count == 1


def test_fit_moment_inversion():
    # two points symmetric about gamma with sample std pi/sqrt(6)
    half = math.pi / math.sqrt(6) / math.sqrt(2)
    law = gumbel_fit_moments(SampleSet([EULER_GAMMA - half, EULER_GAMMA + half]))
    assert (law.location, law.scale) == pytest.approx((0, 1), abs=1e-12)
    with pytest.raises(ValueError):
        gumbel_fit_moments(SampleSet([2.0, 2.0, 2.0]))


def test_fit_monte_carlo():
    x = GumbelLaw(10, 5).sample(np.random.default_rng(5), 100_000)
    law = gumbel_fit_moments(SampleSet(x))
    assert abs(law.location - 10) < 0.1 and abs(law.scale - 5) < 0.1
    z = standardize(SampleSet(x), law).values
    assert abs(z.mean() - EULER_GAMMA) < 3 * math.pi / math.sqrt(6) / math.sqrt(z.size)
    assert z.var(ddof=1) == pytest.approx(math.pi**2 / 6, rel=1e-9)


def test_standardize_affine():
    s = SampleSet([1.0, 4.0, 9.0])
    assert standardize(s, GumbelLaw(0, 1)).values.tolist() == [1.0, 4.0, 9.0]
    once = standardize(s, GumbelLaw(2, 3))
    assert standardize(once, GumbelLaw(0, 1)).values.tolist() == once.values.tolist()


def test_summary():
    s = summary_stats(SampleSet([1, 1, 1, 1]))
    assert (s.mean, s.variance) == (1, 0)
    s = summary_stats(SampleSet([0, 2]))
    assert (s.mean, s.variance) == (1, 2)
    assert s.mean_ci_95[1] - s.mean == pytest.approx(1.96)
    e = summary_stats(SampleSet(np.random.default_rng(6).exponential(1, 10_000)))
    assert abs(e.mean - 1) < 0.02
    with pytest.raises(ValueError):
        summary_stats(SampleSet([1.0]))


def test_kolmogorov_critical():
    assert kolmogorov_critical(1000) == pytest.approx(1.63 / math.sqrt(1000), rel=2e-3)
