import numpy as np
import pytest

from birkhoff import pendulum as p


def test_hamiltonian_values():
    assert p.hamiltonian(1.0, 0.0) == 0.0
    assert p.hamiltonian(0.0, 0.0) == 0.25
    assert p.hamiltonian(p.turning_points(0.04)[1], 0.0) == pytest.approx(0.04, abs=1e-15)


def test_turning_points():
    zm, zp = p.turning_points(0.04)
    assert zm == pytest.approx(np.sqrt(0.6), abs=1e-15)
    assert zp == pytest.approx(np.sqrt(1.4), abs=1e-15)
    zm, zp = p.turning_points(1e-14)
    assert zm == pytest.approx(1, abs=1e-6) and zp == pytest.approx(1, abs=1e-6)
    assert p.turning_points(0.25 - 1e-12)[0] < 1e-5


@pytest.mark.parametrize("E", [0.0, -0.1, 0.25, 0.3])
def test_energy_range_enforced(E):
    with pytest.raises(ValueError):
        p.turning_points(E)


def test_small_amplitude_period():
    assert abs(p.period(1e-6) - np.pi * np.sqrt(2)) < 1e-4


@pytest.mark.parametrize("E", [0.005, 0.02, 0.05, 0.1, 0.2])
def test_period_finite_and_matches_time_of_flight(E):
    T = p.period(E)
    assert np.isfinite(T) and T > 0
    assert p.time_of_flight(E)[0] == pytest.approx(T, abs=1e-8)


def test_period_near_separatrix_uses_fallback():
    T = p.period(0.25 - 1e-12)
    assert np.isfinite(T) and T > p.period(0.24)


@pytest.mark.parametrize("E", np.logspace(-4, np.log10(0.24), 20))
def test_theta_integral_is_four_pi(E):
    assert abs(p.theta_integral(E) - 4 * np.pi) < 1e-8


def test_theta_by_trajectory():
    assert abs(p.time_of_flight(0.1)[1] - 4 * np.pi) < 1e-7


def test_zero_energy_is_constant():
    traj = p.integrate(0.0, samples=11)
    assert np.all(traj.zeta == 1.0) and np.all(traj.H == 0.0)


def test_trajectory_properties():
    E = 0.04
    zm, zp = p.turning_points(E)
    traj = p.integrate(E, samples=4001)
    assert np.max(np.abs(traj.H - E)) < 1e-9
    assert abs(traj.zeta[-1] - zp) < 1e-7
    assert abs(traj.zeta.min() - zm) < 1e-7
    # time reversal about the lower turning point
    assert np.allclose(traj.zeta, traj.zeta[::-1], atol=1e-9)
    assert np.allclose(traj.zeta_tau, -traj.zeta_tau[::-1], atol=1e-9)


@pytest.mark.parametrize("E", [0.005, 0.02, 0.05])
def test_gamma_curve_turns_twice_and_does_not_close(E):
    g = p.gamma_curve(E)
    assert abs(g.turning_angle - 4 * np.pi) < 1e-6
    assert g.endpoint_gap > 1e-3
    assert g.points[0] == 0


def test_gamma_curve_small_energy_is_double_circle():
    g = p.gamma_curve(1e-12)
    radius = 1 / (16 * np.sqrt(2))
    centre = 1j * radius
    assert np.max(np.abs(np.abs(g.points - centre) - radius)) < 1e-6
    assert g.endpoint_gap < 1e-6


def test_gamma_curve_scaling_with_c_star():
    a = p.gamma_curve(0.02, 1.0)
    b = p.gamma_curve(0.02, 4.0)
    assert np.allclose(b.points, a.points / 8, atol=1e-12)
    with pytest.raises(ValueError):
        p.gamma_curve(0.02, 0.0)


def test_self_intersections_counts_crossings():
    square_loop = np.array([0, 2, 2 + 2j, 1 - 1j])  # last segment crosses the first
    assert p.self_intersections(square_loop) == 1
    assert p.self_intersections(np.array([0, 1, 1 + 1j, 1j])) == 0
