import numpy as np
import pytest

from birkhoff import orbits
from birkhoff.domain import Disc, build_chart
from birkhoff.lazutkin import build_lazutkin


def test_disc_regular_pentagon(disc1):
    chart, lc = disc1
    orb = orbits.find_orbit(chart, lc, 5)
    assert np.allclose(orb.s, 2 * np.pi * np.arange(5) / 5, atol=1e-12)
    assert orb.perimeter == pytest.approx(10 * np.sin(np.pi / 5), abs=1e-13)
    assert orb.residual < 1e-10 and orb.is_maximum


@pytest.mark.parametrize("q", [3, 4, 7, 16])
def test_disc_lazutkin_points_are_equidistributed(q):
    chart = build_chart(Disc(2.0))
    lc = build_lazutkin(chart)
    orb = orbits.find_orbit(chart, lc, q)
    frac, alpha = orbits.extract_alpha(orb)
    assert np.allclose(orb.x, frac, atol=1e-13)
    assert np.max(np.abs(alpha)) < 1e-9


def test_ellipse_orbit_q32(ellipse12):
    chart, lc = ellipse12
    orb = orbits.find_orbit(chart, lc, 32)
    assert orb.residual < 1e-10 and orb.is_maximum
    assert np.all(np.diff(orb.x) > 0) and orb.x[-1] < 1


@pytest.mark.parametrize("q", [3, 5, 6])
def test_small_q_orbits_converge(ellipse12, q):
    chart, lc = ellipse12
    orb = orbits.find_orbit(chart, lc, q)
    assert orb.residual < 1e-10


def test_unanchored_orbit(ellipse12):
    chart, lc = ellipse12
    orb = orbits.find_orbit(chart, lc, 12, anchor=None)
    assert orb.residual < 1e-10


def test_symmetric_orbit(ellipse12):
    chart, lc = ellipse12
    x = orbits.find_orbit(chart, lc, 32).x
    assert np.max(np.abs(x[1:] + x[:0:-1] - 1)) < 1e-9


def test_perimeter_is_local_maximum(ellipse12):
    chart, lc = ellipse12
    orb = orbits.find_orbit(chart, lc, 16)

    def perimeter(s):
        z = chart.point(s)
        return np.sum(np.abs(np.diff(np.append(z, z[0]))))

    base = perimeter(orb.s)
    for k in range(1, 16):
        for d in (1e-4, -1e-4):
            s = orb.s.copy()
            s[k] += d
            assert perimeter(s) < base


def test_q_below_three_rejected(ellipse12):
    with pytest.raises(ValueError):
        orbits.find_orbit(*ellipse12, 2)


def test_alpha_convergence_and_cross_validation(ellipse12):
    chart, lc = ellipse12
    table = orbits.alpha_table(chart, lc, (32, 64, 128))
    for j in (4, 12):  # k/q = 1/8, 3/8
        assert 3 <= table.doubling_ratios(j)[0] <= 5
    cv = orbits.cross_validate_x1(chart, lc, table)
    assert cv["relative"] and cv["max_deviation"] < 1e-2


def test_cross_validation_fourier(fourier_a2):
    chart, lc = fourier_a2
    cv = orbits.cross_validate_x1(chart, lc, orbits.alpha_table(chart, lc, (32, 64, 128)))
    assert cv["max_deviation"] < 1e-2


def test_cross_validation_disc(disc1):
    chart, lc = disc1
    cv = orbits.cross_validate_x1(chart, lc, orbits.alpha_table(chart, lc, (16, 32)))
    assert not cv["relative"] and cv["max_deviation"] < 1e-8


def test_ladder_must_double(ellipse12):
    with pytest.raises(ValueError):
        orbits.alpha_table(*ellipse12, (32, 48))
