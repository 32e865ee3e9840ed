import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brwsim import DomainError, PhiRangeError, PoorFit, discrete_binary, discrete_gw, gaussian_boundary
from brwsim import fixedpoint as fp
from brwsim.fixedpoint import PhiTable, cstar_fit, laplace_check, smoothing_operator, solve_phi, xi_star_samples

import oracles

# Richardson-extrapolated values from oracles.phi_oracle at steps 0.02 and 0.01
BINARY_REF = {0.5: 0.6385018, 2.0: 0.3491218, 10.0: 0.0717211}
GW_REF = {0.01: 0.928106, 0.5: 0.5696824, 2.0: 0.4439338, 10.0: 0.3689578}
LAWS = {"binary": discrete_binary, "gw": discrete_gw, "gaussian": gaussian_boundary}


@pytest.fixture(scope="module")
def solved():
    return {name: (make(), solve_phi(make())) for name, make in LAWS.items()}


def test_operator_on_constants():
    law = discrete_binary()
    t = np.array([0.1, 1.0, 7.0])
    assert np.all(smoothing_operator(law, lambda x: np.ones_like(x), t) == 1.0)
    assert np.allclose(smoothing_operator(law, lambda x: np.full_like(x, 0.3), t), 0.09, rtol=1e-14)
    gw = discrete_gw()
    assert np.allclose(smoothing_operator(gw, lambda x: np.full_like(x, 0.3), t), 0.25 + 0.75 * 0.09, rtol=1e-14)
    assert smoothing_operator(gaussian_boundary(), lambda x: np.full_like(x, 0.3), 2.0) == pytest.approx(0.09, rel=1e-12)


@pytest.mark.parametrize("name", list(LAWS))
def test_solution_shape(solved, name):
    law, phi = solved[name]
    assert phi(1.0) == pytest.approx(0.5, abs=1e-12)
    assert phi(0.0) == 1.0
    vals = phi.phi
    assert np.all(np.diff(vals) <= 1e-15)
    assert np.all((vals > 0) & (vals <= 1))
    assert phi.residual <= 1e-6
    assert phi.iterations > 1 and len(phi.history) == phi.iterations


def test_tail_tends_to_extinction_probability(solved):
    _, phi = solved["gw"]
    assert phi.q == pytest.approx(oracles.q_gw(), abs=1e-12)
    assert abs(phi(phi.t_hi) - phi.q) <= 1e-3
    assert abs(phi(10 * phi.t_hi) - phi.q) <= 1e-3
    _, phib = solved["binary"]
    assert phib.q == 0.0 and phib(phib.t_hi) < 1e-6


@pytest.mark.parametrize("name,ref", [("binary", BINARY_REF), ("gw", GW_REF)])
def test_matches_independent_oracle(solved, name, ref):
    _, phi = solved[name]
    for t, v in ref.items():
        assert phi(t) == pytest.approx(v, abs=2e-6)


@pytest.mark.parametrize("name", list(LAWS))
def test_cstar_fit(solved, name):
    law, phi = solved[name]
    c, r2 = cstar_fit(phi)
    assert c > 0 and r2 >= 0.99
    assert phi.c_star == c
    fine = solve_phi(law, grid=(fp.GRID[0], fp.GRID[1], 2 * fp.GRID[2]))
    assert abs(fine.c_star - c) <= 0.05 * c


def test_cstar_domain_and_fit_errors():
    law = discrete_binary()
    coarse = solve_phi(law, grid=(1e-4, 1e3, 120), tol=1e-8)
    with pytest.raises(DomainError):
        cstar_fit(coarse)
    assert math.isnan(coarse.c_star)
    g = np.geomspace(1e-8, 1e-6, 20)
    noisy = PhiTable(g, np.exp(-np.random.default_rng(0).uniform(1e-9, 1e-6, g.size)), 0.0)
    with pytest.raises(PoorFit):
        cstar_fit(noisy)


@given(st.floats(0.05, 0.95), st.floats(0.001, 0.5), st.floats(1e-3, 50))
def test_operator_monotone(c, d, t):
    law = discrete_gw()
    lo = smoothing_operator(law, lambda x: c * np.exp(-x * d), t)
    hi = smoothing_operator(law, lambda x: np.minimum(1.0, (c + 0.04) * np.exp(-x * d)), t)
    assert lo <= hi + 1e-15


@pytest.mark.parametrize("name", list(LAWS))
def test_change_history_mostly_nonincreasing(solved, name):
    hist = np.array(solved[name][1].history[5:])
    ups = np.count_nonzero(np.diff(hist) > 0)
    assert ups <= 0.1 * max(len(hist) - 1, 1)


@pytest.mark.parametrize("name", list(LAWS))
def test_fixed_point_between_grid_points(solved, name):
    law, phi = solved[name]
    lt = np.log(phi.grid)
    mids = np.exp(0.5 * (lt[1:] + lt[:-1]))
    dev = np.max(np.abs(phi(mids) - smoothing_operator(law, phi, mids)))
    assert dev <= 5 * max(phi.residual, phi.tol)


def test_csv_round_trip(solved):
    _, phi = solved["gw"]
    buf = io.StringIO()
    text = phi.to_csv(buf)
    assert buf.getvalue() == text and text.startswith("# q=")
    back = PhiTable.from_csv(text)
    assert np.array_equal(back.grid, phi.grid)
    assert np.array_equal(back.phi, phi.phi) and np.array_equal(back.y, phi.y)
    assert back.q == phi.q and back.scale == phi.scale and back.residual == phi.residual
    assert back.to_csv() == text


def test_range_errors(solved):
    _, phi = solved["binary"]
    with pytest.raises(PhiRangeError):
        phi(-0.1)
    with pytest.raises(PhiRangeError):
        phi(float("nan"))


def test_hermite_node_count_is_sufficient(solved, monkeypatch):
    _, phi = solved["gaussian"]
    t = np.array([1e-4, 0.3, 1.0, 4.0, 50.0])
    base = smoothing_operator(gaussian_boundary(), phi, t)
    monkeypatch.setattr(fp, "HERMITE_NODES", 128)
    fine = smoothing_operator(gaussian_boundary(), phi, t)
    # quadrature error well below what the solver itself resolves
    assert np.max(np.abs(base - fine)) <= 0.1 * phi.residual


def test_xi_star_small_run(solved):
    law, phi = solved["gw"]
    xi = xi_star_samples(law, 40, 1500, seed=9, phi=phi, mode=fp.Mode("prune", 150.0))
    assert xi.shape == (1500,) and np.all(xi >= 0)
    zero = np.mean(xi < 1e-6)
    assert abs(zero - phi.q) <= 4 * math.sqrt(phi.q * (1 - phi.q) / xi.size)
    for t, m, se, target in laplace_check(xi, phi):
        assert abs(m - target) <= 4 * se + 5e-3
