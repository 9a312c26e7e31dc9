import numpy as np
import pytest

from birkhoff import normal_form as nf
from birkhoff.domain import Disc, Ellipse, FourierDomain, build_chart
from birkhoff.lazutkin import build_lazutkin


def _lc(spec):
    return build_lazutkin(build_chart(spec))


def test_disc_has_vanishing_x1_and_a(disc1):
    chart, lc = disc1
    s = np.linspace(0, chart.length, 64)
    assert np.max(np.abs(nf.x1(lc, s))) < 1e-14
    assert np.max(np.abs(nf.a_of_xi(lc, np.linspace(0, 1, 64)))) < 1e-14


def test_normalization_and_periodicity(ellipse12, fourier_a2):
    for chart, lc in (ellipse12, fourier_a2):
        assert nf.x1(lc, 0.0) == 0.0
        assert nf.a_of_xi(lc, 0.0) == 0.0
        assert abs(nf.a_of_xi(lc, 1.0)) < 1e-9
        assert abs(nf.x1(lc, chart.length)) < 1e-9


def test_x1_two_routes_agree(ellipse12):
    chart, lc = ellipse12
    data = nf.normal_form(lc)
    s = np.linspace(0, chart.length, 301)
    direct = data.x1(s)
    assert np.max(np.abs(direct)) > 1e-4
    assert np.max(np.abs(direct - data.x1_via_a(s))) < 1e-6 * np.max(np.abs(direct))
    # the arc-length correction is A carried back by dX0/ds
    inner = s[1:-1]
    assert np.allclose(data.z_al1(inner) * lc.x0_dot(inner), data.a(lc.x0(inner)), atol=1e-12)


def test_a_derivatives_match_finite_differences(ellipse12):
    _, lc = ellipse12
    xi = np.linspace(0.03, 0.97, 17)
    h = 1e-3
    a = lambda x: nf.a_of_xi(lc, x)
    _, a1, a2 = nf.a_jet(lc, xi)
    fd1 = (a(xi - 2 * h) - 8 * a(xi - h) + 8 * a(xi + h) - a(xi + 2 * h)) / (12 * h)
    fd2 = (-a(xi + 2 * h) + 16 * a(xi + h) - 30 * a(xi) + 16 * a(xi - h) - a(xi - 2 * h)) / (12 * h * h)
    assert np.max(np.abs(fd1 - a1)) < 1e-8
    _, _, b4 = nf.classical_coefficients(lc, xi)
    assert np.max(np.abs(fd2 / 4 + b4)) < 1e-5 * np.max(np.abs(b4))
    assert np.max(np.abs(fd2 - a2)) < 1e-6 * np.max(np.abs(a2))


def test_classical_coefficients_disc(disc1):
    _, lc = disc1
    a3, a4, b4 = nf.classical_coefficients(lc, 0.4)
    assert a3 == pytest.approx(np.pi**2 / 24, rel=1e-13)
    assert a4 == pytest.approx(0, abs=1e-15)
    assert b4 == pytest.approx(0, abs=1e-15)


def test_beta4_is_minus_half_alpha4(fourier_a2):
    _, lc = fourier_a2
    xi = np.linspace(0, 1, 64, endpoint=False)
    _, a4, b4 = nf.classical_coefficients(lc, xi)
    assert np.max(np.abs(b4 + a4 / 2)) < 1e-12


@pytest.mark.parametrize("spec", [Ellipse(1, 1.2), FourierDomain(1.0, ((2, 0.05, 0.0),))])
def test_ode_residual_vanishes(spec):
    lc = _lc(spec)
    xi = np.linspace(0, 1, 16, endpoint=False)
    assert np.max(np.abs(nf.ode_residual(lc, xi))) < 1e-8


def test_ode_residual_zero_for_disc(disc1):
    assert nf.ode_residual(disc1[1], 0.3) == 0.0


def test_phi_plus_matches_truncated_expansion(ellipse13):
    _, lc = ellipse13
    eta = 1e-2
    for xi in (0.1, 0.37, 0.8):
        c = nf.chord_coefficients(lc, xi)
        r = lc.rho_l(xi)
        im = sum(c[f"S{j}"] * eta**j for j in range(6)) * np.cbrt(r) / lc.c_l**2
        re = sum(c[f"C{j}"] * eta**j for j in range(5)) * r ** (2 / 3) / lc.c_l
        got = nf.phi_plus(lc, xi, eta)
        assert abs(np.arctan(im / re) / got - 1) < 1e-6


def test_disc_phi_plus_is_pi_eta(disc1):
    _, lc = disc1
    eta = 0.01
    assert nf.phi_plus(lc, 0.3, eta) == pytest.approx(np.pi * eta, rel=1e-14)
    assert nf.phi_minus(lc, 0.3, eta) == pytest.approx(np.pi * eta, rel=1e-14)


def test_phi_minus_is_reflected_phi_plus(ellipse12):
    _, lc = ellipse12
    assert nf.phi_minus(lc, 0.3, 0.02) == pytest.approx(-nf.phi_plus(lc, 0.3, -0.02), rel=1e-13)


def test_coincident_points_rejected(ellipse12):
    with pytest.raises(ValueError):
        nf.phi_plus(ellipse12[1], 0.3, 0.0)


def test_defect_orders(ellipse12):
    _, lc = ellipse12
    eta = np.array([0.02, 0.01, 0.005])
    slope = lambda v: np.polyfit(np.log(eta), np.log(np.abs(v)), 1)[0]
    assert abs(slope(nf.pseudocollision_defect(lc, 0.37, eta)) - 4) < 0.2
    with_a = nf.pseudocollision_defect(lc, 0.37, eta, "auto")
    assert abs(slope(with_a) - 6) < 0.3
    ratio = np.abs(with_a / eta**6)
    assert ratio.max() / ratio.min() < 1.1


def test_phi4_disc_is_zero(disc1):
    est = nf.phi4_numeric(disc1[1], 0.5)
    assert abs(est.phi2) < 1e-8
    assert abs(est.phi4) < 1e-8


def test_phi4_matches_closed_form(ellipse12):
    _, lc = ellipse12
    est = nf.phi4_numeric(lc, 0.2)
    assert abs(est.phi2) < 1e-8
    assert est.phi4 == pytest.approx(nf.phi4_closed_form(lc, 0.2), rel=1e-5)


def test_phi4_cancelled_by_a(ellipse12):
    _, lc = ellipse12
    assert abs(nf.phi4_numeric(lc, 0.2, "auto").phi4) < 1e-6
    assert abs(nf.phi4_closed_form(lc, 0.2, "auto")) < 1e-12


def test_chord_coefficients_constants_every_domain(disc1, ellipse13, fourier_a2):
    for _, lc in (disc1, ellipse13, fourier_a2):
        c = nf.chord_coefficients(lc, 0.41)
        assert c["S0"] == c["S1"] == c["C0"] == 0
        assert c["S2"] == 0.5 and c["C1"] == 1.0


def test_chord_coefficients_disc_specialization(disc1):
    c = nf.chord_coefficients(disc1[1], 0.2)
    assert c["S3"] == 0 and c["C2"] == 0
    assert c["S4"] == pytest.approx(-np.pi**2 / 6, rel=1e-14)


@pytest.mark.parametrize("correction", [None, "auto"])
def test_chord_coefficients_closed_forms_match_oracle(ellipse13, correction):
    _, lc = ellipse13
    closed = nf.chord_coefficients(lc, 0.37, correction)
    oracle = nf.chord_expansion_oracle(lc, 0.37, correction)
    for key in nf.CHORD_KEYS:
        assert abs(oracle[key] - closed[key]) <= 1e-6 * max(abs(closed[key]), 1.0), key


def test_competing_constants_are_rejected(ellipse13):
    """The oracle separates nearby rational constants in the eta^4 and eta^5 terms."""
    _, lc = ellipse13
    xi = 0.37
    oracle = nf.chord_expansion_oracle(lc, xi)
    r, r1, r2, _ = lc.rho_l_jet(xi)
    closed = nf.chord_coefficients(lc, xi)
    alt_s4 = closed["S4"] + (5 / 27 - 5 / 72) * r2 / r
    assert abs(alt_s4 - oracle["S4"]) > 1e-2
    oracle_a = nf.chord_expansion_oracle(lc, xi, "auto")
    closed_a = nf.chord_coefficients(lc, xi, "auto")
    _, a1, _ = nf.a_jet(lc, xi)
    alt_c4 = closed_a["C4"] - (1 / 3) * a1 * r1 / r
    assert abs(alt_c4 - oracle_a["C4"]) > 1e-3


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_disc_verdict(r):
    verdict = nf.disc_test(_lc(Disc(r)))
    assert verdict.is_disc and verdict.sup_norm_x1 < 1e-10
    assert str(verdict).startswith("DISC")


@pytest.mark.parametrize(
    "spec",
    [Ellipse(1, 1.05), FourierDomain(1.0, ((3, 0.02, 0.0),)), FourierDomain(1.0, ((2, 0.0, 0.03),))],
)
def test_non_disc_verdict(spec):
    verdict = nf.disc_test(_lc(spec))
    assert not verdict.is_disc and verdict.sup_norm_x1 > 1e-4
