import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from ptkr_otoc import (
    DistributionSnapshot,
    SimParams,
    double_factorial,
    expectation,
    fit_power_law_tail,
    gaussian_initial,
    make_grid,
    norm_growth_scan,
    predict,
    snapshot,
)
from ptkr_otoc.analysis import THETA_C, broken_phase, gaussian_p_moment, growth_rate


def test_initial_theta2_matches_quadrature():
    sigma = 10.0
    num = quad(lambda x: x**2 * math.exp(-sigma * x**2), -math.pi, math.pi)[0]
    den = quad(lambda x: math.exp(-sigma * x**2), -math.pi, math.pi)[0]
    g = make_grid(N=1024, hbar=0.1)
    s = gaussian_initial(g, sigma)
    assert expectation(s, g, "theta", 2) == pytest.approx(num / den, rel=1e-10)
    assert num / den == pytest.approx(0.05, rel=1e-10)
    assert expectation(s, g, "theta") == pytest.approx(0.0, abs=1e-14)
    assert expectation(s, g, "p") == pytest.approx(0.0, abs=1e-14)


def test_expectation_rejects_unknown_and_zero():
    g = make_grid(N=32, hbar=0.1)
    s = gaussian_initial(g, 10.0)
    with pytest.raises(ValueError):
        expectation(s, g, "q")
    with pytest.raises(ValueError):
        expectation(s.with_amplitudes(np.zeros(32, complex)), g, "p")


def test_snapshot_normalization_and_raw_scale():
    g = make_grid(N=64, hbar=0.1)
    s = gaussian_initial(g, 10.0)
    big = s.with_amplitudes(3 * s.amplitudes)
    a = snapshot(big, g, "theta")
    assert a.probabilities.sum() == pytest.approx(1.0, rel=1e-14)
    raw = snapshot(big, g, "p", normalized=False)
    assert raw.probabilities.sum() == pytest.approx(9.0, rel=1e-12)
    assert a.peak_index == 32  # theta = 0
    with pytest.raises(ValueError):
        snapshot(s, g, "x")


def synthetic(prob_fn, N=4096, hbar=0.1, centre=0.0):
    n = np.arange(-N // 2, N // 2)
    p = n * hbar
    prob = prob_fn(p - centre)
    return DistributionSnapshot("p", p, prob / prob.sum())


@pytest.mark.parametrize("alpha", [1.5, 2.0, 2.5])
def test_fit_recovers_synthetic_power_law(alpha):
    fit = fit_power_law_tail(synthetic(lambda d: (d**2 + 0.01) ** (-alpha / 2), centre=12.3))
    assert fit.exponent == pytest.approx(-alpha, abs=0.02)
    assert fit.p_c == pytest.approx(12.3, abs=0.05)
    assert fit.is_power_law
    assert len(fit.fit_window) == 2


def test_fit_flags_exponential_tail():
    fit = fit_power_law_tail(synthetic(lambda d: np.exp(-np.abs(d) / 3.0)))
    assert not fit.is_power_law


def test_fit_needs_enough_points():
    with pytest.raises(ValueError):
        fit_power_law_tail(synthetic(lambda d: np.exp(-d**2 * 1e4), N=64))


def test_tail_of_theta_echoed_state(ref_echo, ref_setup):
    fit = fit_power_law_tail(snapshot(ref_echo.perturbed, ref_setup.grid, "p"))
    assert -2.3 <= fit.exponent <= -1.7
    # the tail sits on the directed-current front, p_c ~ K t
    assert fit.p_c == pytest.approx(2 * np.pi * 10, rel=0.05)


def test_forward_position_peak_near_theta_c(ref_echo):
    snap = [s for s in ref_echo.forward.snapshots if s.t == 10 and s.axis == "theta"][0]
    assert snap.values[snap.peak_index] == pytest.approx(THETA_C, rel=0.05)


def test_double_factorial():
    assert [double_factorial(k) for k in (-1, 0, 1, 2, 3, 5, 7, 8)] == [1, 1, 1, 2, 3, 15, 105, 384]
    with pytest.raises(ValueError):
        double_factorial(-2)


@pytest.mark.parametrize("m,value", [(1, 0.1234), (2, 0.01851), (3, 0.004626)])
def test_C2_predictions(m, value):
    assert predict("C2", 0, m) == pytest.approx(value, rel=1e-3)


@pytest.mark.parametrize("m,value", [(1, 2.02e4), (2, 1.36e12), (3, 9.10e19)])
def test_C_predictions(m, value):
    assert predict("C", 2**13, m) == pytest.approx(value, rel=5e-3)
    assert predict("C1", 2**13, m) == predict("C", 2**13, m)


def test_C3_predictions():
    assert predict("C3", 1024, 1) == 0.0
    assert predict("C3", 1024, 2, eta=6.05e-7) == pytest.approx(6.05e-7 * 1024)
    with pytest.raises(ValueError):
        predict("C3", 1024, 2)
    with pytest.raises(ValueError):
        predict("C4", 1024, 1)
    with pytest.raises(ValueError):
        predict("C", 1024, 0)


@given(k=st.integers(1, 12), m=st.integers(1, 4))
def test_prediction_ratio_under_doubling(k, m):
    N = 2**k
    assert predict("C", 2 * N, m) / predict("C", N, m) == pytest.approx(2 ** (2 * m - 1), rel=1e-12)


def test_gaussian_moment_formula():
    assert gaussian_p_moment(1, 10.0, 0.1) == pytest.approx(0.05)
    assert gaussian_p_moment(2, 10.0, 0.1) == pytest.approx(3 * 0.05**2)


def test_growth_rate_on_a_line():
    assert growth_rate(3.0 * np.arange(20) + 1) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        growth_rate(np.arange(3.0))


def test_lambda_scan_orders_the_phases():
    rows = norm_growth_scan(SimParams(N=256), [0.0, 0.3, 0.9, 1.2], n_steps=20)
    lam, rate = rows.T
    assert abs(rate[0]) < 1e-10
    assert np.all(np.diff(rate) > 0)
    assert list(broken_phase(rate)) == [False, True, True, True]
