import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import ks_2samp

from brwsim import NonPositiveStatistic, discrete_binary, discrete_gw, gaussian_boundary
from brwsim.rwtools import (RandomWalkPath, exponent_regress, min_exp_moment, sample_walks,
                            stay_positive, stay_positive_exact, walk_paths)
from brwsim.spine import sample_spine

from oracles import ballot_fair


def test_exact_small_cases():
    law = discrete_binary()
    assert stay_positive_exact(law, 0) == 1.0
    assert stay_positive_exact(law, 1) == pytest.approx(0.5, abs=1e-15)
    assert stay_positive_exact(law, 2) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("n", range(1, 25))
def test_exact_matches_ballot_oracle(n):
    assert stay_positive_exact(discrete_binary(), n) == pytest.approx(float(ballot_fair(n)), rel=1e-12)
    # the gw spine is also a fair +-a walk
    assert stay_positive(discrete_gw(), n)[0] == pytest.approx(float(ballot_fair(n)), rel=1e-12)


@pytest.mark.parametrize("n", [3, 10, 20])
def test_monte_carlo_agrees_with_exact(n):
    law = discrete_binary()
    p, se = stay_positive(law, n, trials=40_000, seed=n, method="mc")
    assert abs(p - stay_positive_exact(law, n)) <= 4 * se


def test_continuous_law_needs_monte_carlo():
    with pytest.raises(ValueError):
        stay_positive_exact(gaussian_boundary(), 5)
    p, se = stay_positive(gaussian_boundary(), 1, trials=20_000, seed=1)
    assert abs(p - 0.5) <= 4 * se
    with pytest.raises(ValueError):
        stay_positive(discrete_binary(), 3, method="fast")


def test_ballot_ratio_tends_to_constant():
    law = discrete_binary()
    r = [stay_positive_exact(law, n) * math.sqrt(n) for n in (200, 400, 800)]
    # sqrt(n) P(S_1..S_n > 0) -> sqrt(2/pi) / 2 for the fair simple walk
    assert abs(r[2] - math.sqrt(2 / math.pi) / 2) < abs(r[0] - math.sqrt(2 / math.pi) / 2)
    assert r[2] == pytest.approx(math.sqrt(2 / math.pi) / 2, rel=5e-3)


def test_path_object():
    p = RandomWalkPath([0.0, 1.0, -2.0, -2.0, 3.0])
    assert p.n == 4 and p.minimum == -2.0 and p.argmin == 2
    assert list(p.running_min) == [0.0, 0.0, -2.0, -2.0, -2.0]
    with pytest.raises(ValueError):
        RandomWalkPath([1.0, 2.0])


def test_walk_sampling_deterministic():
    a = np.concatenate(list(walk_paths(discrete_binary(), 12, 3000, seed=4)))
    b = np.concatenate(list(walk_paths(discrete_binary(), 12, 3000, seed=4)))
    assert a.shape == (3000, 13) and np.array_equal(a, b)
    walks = sample_walks(discrete_binary(), 12, 50, seed=4)
    assert np.array_equal(walks[7].steps, a[7])


def test_min_exp_moment_trivial_and_trend():
    law = discrete_binary()
    assert min_exp_moment(law, 0.0, 50) == (1.0, 0.0)
    assert min_exp_moment(law, 1.0, 0) == (1.0, 0.0)
    with pytest.raises(ValueError):
        min_exp_moment(law, -1.0, 5)
    vals = [min_exp_moment(law, 1.0, n, trials=20_000, seed=3)[0] for n in (4, 16, 64, 256)]
    assert all(0 < v <= 1 for v in vals)
    assert np.all(np.diff(vals) < 0)


def test_regress_examples():
    ns = [1, 2, 4, 8, 16]
    s, i, r2 = exponent_regress([(n, 3 * n ** -0.5) for n in ns])
    assert s == pytest.approx(-0.5) and i == pytest.approx(math.log(3)) and r2 == pytest.approx(1.0)
    s, i, r2 = exponent_regress([(n, 1.5 * math.log(n) + 2) for n in ns], kind="log")
    assert s == pytest.approx(1.5) and i == pytest.approx(2.0)
    assert exponent_regress([(n, 7.0) for n in ns])[2] == 1.0


def test_regress_errors():
    with pytest.raises(ValueError):
        exponent_regress([(1, 1.0), (2, 2.0)])
    with pytest.raises(NonPositiveStatistic):
        exponent_regress([(1, 1.0), (2, 0.0), (4, 3.0)])
    with pytest.raises(NonPositiveStatistic):
        exponent_regress([(1, 1.0), (2, float("nan")), (4, 3.0)], kind="log")
    with pytest.raises(ValueError):
        exponent_regress([(0, 1.0), (2, 1.0), (4, 3.0)])
    with pytest.raises(ValueError):
        exponent_regress([(1, 1.0), (2, 1.0), (4, 3.0)], kind="cubic")


@given(st.floats(-3, 3), st.floats(-5, 5), st.lists(st.integers(1, 10_000), min_size=3, max_size=8, unique=True))
def test_regress_recovers_exact_power_law(a, c, ns):
    s, i, r2 = exponent_regress([(n, math.exp(c) * n ** a) for n in ns])
    assert s == pytest.approx(a, abs=1e-8) and i == pytest.approx(c, abs=1e-7)


def test_spine_minima_match_walk_minima():
    law = gaussian_boundary()
    n, trials = 20, 1500
    spine_min = [sample_spine(law, n, seed=77, trial=k).spine_path.min() for k in range(trials)]
    walk_min = np.concatenate([p.min(axis=1) for p in walk_paths(law, n, trials, seed=78)])
    assert ks_2samp(spine_min, walk_min).pvalue > 0.01
