import numpy as np
import pytest

from birkhoff.quadrature import (
    ExtrapolationError,
    PeriodicCumulative,
    chebyshev_nodes,
    fit_power_coefficients,
    gauss_legendre,
    geometric_ladder,
    integrate_interval,
    invert_monotone,
)


def test_gauss_legendre_integrates_polynomials_exactly():
    x, w = gauss_legendre(8)
    assert np.isclose(np.sum(w * x**15), 1 / 16, rtol=0, atol=1e-15)


def test_integrate_interval_vectorised_over_endpoints():
    lo = np.array([0.0, 1.0])
    hi = np.array([np.pi, 2.0])
    got = integrate_interval(np.sin, lo, hi, 20)
    assert np.allclose(got, [2.0, np.cos(1) - np.cos(2)], atol=1e-14)


def test_periodic_cumulative_matches_antiderivative():
    f = lambda t: 1.0 + 0.3 * np.cos(2 * t)
    cum = PeriodicCumulative(f)
    t = np.array([-1.0, 0.3, 2.0, 7.5])
    assert np.allclose(cum(t), t + 0.15 * np.sin(2 * t), atol=1e-13)
    assert cum.total == pytest.approx(2 * np.pi, abs=1e-13)


def test_invert_monotone_round_trip():
    f = lambda t: t + 0.2 * np.sin(t)
    df = lambda t: 1 + 0.2 * np.cos(t)
    grid = np.linspace(0, 2 * np.pi, 33)
    target = np.linspace(0.1, 6.0, 11)
    t = invert_monotone(f, df, grid, f(grid), target)
    assert np.max(np.abs(f(t) - target)) < 1e-14


def test_fit_power_coefficients_recovers_polynomial():
    eta = geometric_ladder(0.1, 5)
    values = 2 * eta**2 - 3 * eta**4 + 0.5 * eta**6
    coef, cond = fit_power_coefficients(eta, values, [2, 4, 6])
    assert np.allclose(coef, [2, -3, 0.5], rtol=1e-9)
    assert cond > 1


def test_fit_power_coefficients_handles_complex_values():
    eta = chebyshev_nodes(0.1, 8)
    values = (1 + 2j) * eta + (3 - 1j) * eta**2
    coef, _ = fit_power_coefficients(eta, values, [1, 2])
    assert np.allclose(coef, [1 + 2j, 3 - 1j], atol=1e-12)


def test_fit_rejects_ill_conditioned_systems():
    eta = np.array([0.1, 0.1, 0.05])  # repeated node: singular basis
    with pytest.raises(ExtrapolationError):
        fit_power_coefficients(eta, eta**2, [2, 4, 6])


def test_chebyshev_nodes_avoid_origin():
    nodes = chebyshev_nodes(1.0, 24)
    assert np.min(np.abs(nodes)) > 0
    assert np.max(np.abs(nodes)) < 1
