import math

import numpy as np
import pytest

from brwsim import NotBoundary, OffspringLaw, discrete_binary, discrete_gw, gaussian_boundary
from brwsim.spine import (many_to_one, many_to_one_exact, q_vs_p_consistency, sample_spine,
                          spine_paths, spine_step_law)

from functionals import FUNCTIONALS
from oracles import H


def test_binary_spine_is_fair_walk():
    step = spine_step_law(discrete_binary())
    assert np.allclose(step.values, [-H, H])
    assert np.allclose(step.probs, [0.5, 0.5], atol=1e-12)
    assert step.mean == pytest.approx(0.0, abs=1e-12)
    assert step.variance == pytest.approx(H * H)


def test_gaussian_spine_law():
    step = spine_step_law(gaussian_boundary())
    assert step.mean == 0.0
    assert step.variance == pytest.approx(2 * math.log(2))


def test_gw_spine_brood_is_size_biased():
    step = spine_step_law(discrete_gw())
    # a spine individual always has exactly one brother under {0: 1/4, 2: 3/4}
    assert all(len(bro) == 1 for _, bro, _ in step.outcomes)
    assert math.fsum(p for *_, p in step.outcomes) == pytest.approx(1.0)
    assert step.mean == pytest.approx(0.0, abs=1e-12)


def test_non_boundary_law_rejected():
    with pytest.raises(NotBoundary):
        spine_step_law(OffspringLaw.gaussian_binary(0.0, 1.0))


def test_many_to_one_indicator_oracle():
    lhs, rhs = many_to_one_exact(discrete_binary(), 2, lambda p: float(abs(p[-1] - 2 * H) < 1e-9))
    expected = (7 + 4 * math.sqrt(3)) / 4
    assert lhs == pytest.approx(expected, abs=1e-12)
    assert rhs == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("law", [discrete_binary(), discrete_gw()], ids=lambda l: l.name)
@pytest.mark.parametrize("name", sorted(FUNCTIONALS))
def test_many_to_one_exact(law, name):
    for n in (1, 2, 3):
        lhs, rhs = many_to_one_exact(law, n, FUNCTIONALS[name])
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_many_to_one_monte_carlo_matches_exact():
    law = discrete_binary()
    f = lambda paths: (np.abs(paths[:, -1] - 2 * H) < 1e-9).astype(float)
    est, se = many_to_one(law, 2, f, 40_000, seed=3)
    assert abs(est - (7 + 4 * math.sqrt(3)) / 4) <= 4 * se
    one, se1 = many_to_one(law, 1, lambda p: np.ones(len(p)), 40_000, seed=4)
    assert abs(one - 2.0) <= 4 * se1


def test_many_to_one_n0():
    assert many_to_one(discrete_binary(), 0, lambda p: np.full(len(p), 3.5), 10, seed=0) == (3.5, 0.0)


@pytest.mark.parametrize("law", [discrete_binary(), discrete_gw()], ids=lambda l: l.name)
def test_q_vs_p(law):
    gs = [lambda h: 1.0, lambda h: float(len(h[-1]) > 0), lambda h: len(h[-1]),
          lambda h: min(h[-1]) if h[-1] else 0.0, lambda h: sum(math.exp(-v) for v in h[-1])]
    for n in (1, 2, 3):
        for g in gs:
            lhs, rhs = q_vs_p_consistency(law, n, g)
            assert lhs == pytest.approx(rhs, abs=1e-9)


def test_q_vs_p_known_value():
    # N_1 = 2 surely and E W_1 = 1, so both sides equal 2.5
    lhs, rhs = q_vs_p_consistency(discrete_binary(), 1, lambda h: len(h[-1]) + 0.5)
    assert lhs == pytest.approx(2.5) and rhs == pytest.approx(2.5)


@pytest.mark.parametrize("law", [discrete_binary(), discrete_gw(), gaussian_boundary()],
                         ids=lambda l: l.name)
def test_decorated_spine(law):
    s = sample_spine(law, 6, seed=1, decorate=True, betas=(2.0,))
    st = s.decorated_stats
    assert s.spine_path[0] == 0.0 and len(s.sibling_sets) == 6
    assert np.all(st.count >= 1)  # the spine never dies under Q
    assert np.all(st.min_v <= s.spine_path + 1e-9)
    assert np.all(st.max_v >= s.spine_path - 1e-9)
    assert 0 <= s.argmin <= 6


def test_decorated_q_tree_mean_of_inverse_w():
    # E_Q[1/W_n] = P(W_n > 0); for the binary law that is 1
    law = discrete_binary()
    vals = [1.0 / sample_spine(law, 4, seed=8, decorate=True, trial=t).decorated_stats.w[4]
            for t in range(4000)]
    assert abs(np.mean(vals) - 1.0) <= 4 * np.std(vals, ddof=1) / math.sqrt(len(vals))


def test_spine_paths_shape_and_determinism():
    a = spine_paths(discrete_binary(), 5, 5000, seed=2)
    b = spine_paths(discrete_binary(), 5, 5000, seed=2)
    assert a.shape == (5000, 6) and np.array_equal(a, b)
    assert np.all(a[:, 0] == 0)


def test_q_vs_p_second_moment_of_w1():
    # E W_1^2 = 2 E e^{-2X} + 2 (E e^{-X})^2 = 2 + 1/2 for the binary law
    lhs, rhs = q_vs_p_consistency(discrete_binary(), 1, lambda h: sum(math.exp(-v) for v in h[-1]))
    assert lhs == pytest.approx(2.5, abs=1e-12) and rhs == pytest.approx(2.5, abs=1e-12)
