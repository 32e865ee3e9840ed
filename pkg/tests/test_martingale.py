import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import ks_2samp

from brwsim import DegenerateSample, Generation, Mode, collect, discrete_binary, discrete_gw
from brwsim.fixedpoint import solve_phi
from brwsim.martingale import (additive, conditioned_from_w, conditioned_samples, estimate_lambda,
                               log_multiplicative, lower_tail_prob, multiplicative, norming_from_w,
                               partition)

from oracles import H

positions = st.lists(st.floats(-20, 60, allow_nan=False), min_size=1, max_size=40)
WIDE = Mode("prune", 150.0)


@pytest.fixture(scope="module")
def phi_binary():
    return solve_phi(discrete_binary())


def test_additive_examples():
    assert additive([0.0]) == 1.0
    assert additive([]) == 0.0
    assert additive([H, -H]) == pytest.approx(4.0, abs=1e-14)


def test_partition_examples():
    assert partition([0.0], 7) == 1.0
    with pytest.raises(ValueError):
        partition([0.0], 0.0)


@given(positions)
def test_partition_at_one_is_additive_bit_exact(v):
    assert partition(v, 1.0) == additive(v)
    g = Generation.from_positions(3, v)
    assert partition(g, 1.0) == additive(g)


@given(positions, st.floats(1.01, 5.0))
def test_sandwich(v, beta):
    m = min(v)
    wb = partition(v, beta)
    assert math.exp(-beta * m) <= wb * (1 + 1e-12)
    assert wb <= additive(v) * math.exp(-(beta - 1) * m) * (1 + 1e-12)


@given(positions, st.floats(0.2, 4.0), st.floats(0.05, 2.0))
def test_log_partition_convex_in_beta(v, b, d):
    lw = [math.log(partition(v, x)) for x in (b, b + d, b + 2 * d)]
    assert lw[1] <= 0.5 * (lw[0] + lw[2]) + 1e-9 * (1 + abs(lw[1]))


@given(st.lists(st.floats(0, 50, allow_nan=False), min_size=1, max_size=30), st.floats(0.1, 3), st.floats(0.01, 2))
def test_partition_nonincreasing_in_beta_for_nonnegative_positions(v, b, d):
    assert partition(v, b + d) <= partition(v, b) * (1 + 1e-12)


def test_multiplicative_examples(phi_binary):
    assert multiplicative([], phi_binary) == 1.0
    assert multiplicative([0.0], phi_binary) == pytest.approx(0.5, abs=1e-12)
    assert log_multiplicative(Generation.from_positions(0, []), phi_binary) == 0.0


@given(positions)
def test_multiplicative_in_unit_interval(v):
    phi = _PHI[0]
    w = multiplicative(v, phi)
    assert 0.0 <= w <= 1.0


_PHI = [solve_phi(discrete_binary())]


def test_multiplicative_martingale_mean_and_increments(phi_binary):
    law = discrete_binary()
    s = collect(law, (4, 5), 10_000, seed=21, keep=(4, 5))
    w4 = np.array([multiplicative(g, phi_binary) for g in s.generations[4]])
    w5 = np.array([multiplicative(g, phi_binary) for g in s.generations[5]])
    assert abs(w5.mean() - 0.5) <= 4 * w5.std(ddof=1) / math.sqrt(w5.size)
    d = w5 - w4
    assert abs(d.mean()) <= 4 * d.std(ddof=1) / math.sqrt(d.size)


def test_lambda_zero_is_one():
    est = estimate_lambda(discrete_binary(), 0, 100, seed=1)
    assert est.lambda_n == 1.0 and est.std_error == 0.0


def test_lambda_bracket_at_64():
    est = estimate_lambda(discrete_binary(), 64, 2000, seed=2, mode=WIDE)
    assert 0.1 <= est.lambda_n / math.sqrt(64) <= 10
    assert est.lambda_n > 0 and est.std_error > 0


def test_lambda_trend():
    ns = (4, 16, 64, 256)
    reps = []
    for r in range(5):
        s = collect(discrete_binary(), ns, 1000, seed=300 + r, mode=WIDE)
        reps.append([norming_from_w(n, s.w[n]).lambda_n for n in ns])
    med = np.median(reps, axis=0)
    assert np.all(np.diff(med) > 0)


def test_degenerate_sample():
    with pytest.raises(DegenerateSample):
        norming_from_w(5, np.zeros(10))


def test_conditioned_samples_properties():
    law = discrete_gw()
    s = collect(law, (12,), 3000, seed=5)
    vals, est = conditioned_from_w(12, s.w[12])
    assert np.all(vals > 0)
    assert vals.size == np.count_nonzero(s.w[12] > 0)
    # mean of (lambda W)^{1/2} over all trials is 1 by construction
    allv = est.lambda_n * s.w[12]
    assert np.mean(np.sqrt(allv)) == pytest.approx(1.0, abs=1e-12)
    direct = conditioned_samples(law, 12, 3000, seed=5)
    assert np.array_equal(direct, vals)


def test_conditioned_ks_decreases():
    ns = (16, 32, 64, 128)
    early, late = [], []
    for r in range(3):
        s = collect(discrete_binary(), ns, 4000, seed=400 + r, mode=WIDE)
        c = {n: conditioned_from_w(n, s.w[n])[0] for n in ns}
        early.append(ks_2samp(c[16], c[32]).statistic)
        late.append(ks_2samp(c[64], c[128]).statistic)
    assert np.median(early) > np.median(late)


def test_lower_tail_proxy_nonincreasing():
    ns = (16, 64, 256)
    reps = []
    for r in range(5):
        s = collect(discrete_binary(), ns, 2000, seed=500 + r, mode=WIDE)
        reps.append([lower_tail_prob(n, s.w[n]) for n in ns])
    med = np.median(reps, axis=0)
    assert np.all(np.diff(med) <= 0)
