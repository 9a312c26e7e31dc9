"""The order-phi^2 Lazutkin data X1 and A, and the pseudocollision oracle that checks them.

Notation
--------
xi      Lazutkin coordinate (period 1).
h       rho_L^(-1/3) / (2 sqrt 2).
A       first correction of the angular function in Lazutkin coordinates:
        the triple xi - eta, xi, xi + eta shifted by A(.) eta^2 is a
        pseudocollision up to O(eta^6).  Periodicity of A fixes C_BV.
X1      phi^2 coefficient of the first component of the conjugacy; it satisfies
        X1(s) = -A(X0(s)) Y0(s)^2.

The closed forms are checked against ``phi_plus``/``phi_minus``, which measure
the actual angles of chords of the boundary, and against
``chord_expansion_oracle``, which extracts Taylor coefficients of the chord
numerically.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lazutkin import SQRT8, LazutkinChart
from .quadrature import (
    PeriodicCumulative,
    chebyshev_nodes,
    fit_power_coefficients,
    geometric_ladder,
    integrate_interval,
)

__all__ = [
    "ZeroCorrection",
    "NormalFormData",
    "normal_form",
    "x1",
    "x1_via_a",
    "a_of_xi",
    "a_jet",
    "classical_coefficients",
    "ode_residual",
    "phi_plus",
    "phi_minus",
    "pseudocollision_defect",
    "phi4_numeric",
    "phi4_closed_form",
    "chord_coefficients",
    "chord_expansion_oracle",
    "DiscVerdict",
    "disc_test",
    "CHORD_KEYS",
]

CHORD_KEYS = ("S0", "S1", "S2", "S3", "S4", "S5", "C0", "C1", "C2", "C3", "C4")


class ZeroCorrection:
    """A identically zero (the plain Lazutkin parametrization)."""

    def __call__(self, xi):
        return np.zeros_like(np.asarray(xi, dtype=float))

    def jet(self, xi):
        z = self(xi)
        return z, z, z


class NormalFormData:
    """X1, A and C_BV of one domain.

    Calling the object evaluates A, so it can be passed wherever an angular
    correction is expected.
    """

    def __init__(self, lchart: LazutkinChart):
        self.lchart = lchart
        self.c_bv = lchart.c_bv
        qtol = min(lchart.chart.tol, 1e-13)
        self._a = PeriodicCumulative(self._a_prime_density, tol=qtol)
        self._x1 = PeriodicCumulative(self._x1_density, tol=qtol)

    def _a_prime_theta(self, theta):
        lc = self.lchart
        h, v1, v2, _ = lc.log_h_jet_theta(theta)
        return (v2 + v1**2 + h**2 / lc.c_l**2 - self.c_bv) / 15.0

    def _a_prime_density(self, theta):
        return self._a_prime_theta(theta) * self.lchart.dxi_dtheta(theta)

    def _x1_density(self, theta):
        # arc-length integrand of X1 times ds/dtheta
        lc = self.lchart
        c = lc.c_l
        rho, rdot, rddot, _ = lc.chart.curvature_jet_theta(theta)
        r13 = np.cbrt(rho)
        bracket = (
            8 * c**2 * rdot**2 / (135 * r13**4)
            - 4 * c**2 * rddot / (45 * r13)
            + c**2 / (30 * r13**4)
            - 4 * c**4 * self.c_bv / (15 * r13**2)
        )
        return bracket * rho

    # A on the Lazutkin circle
    def a(self, xi):
        return self._a(self.lchart.theta_of_xi(xi))

    __call__ = a

    def a_jet_theta(self, theta):
        lc = self.lchart
        h, v1, v2, v3 = lc.log_h_jet_theta(theta)
        a1 = (v2 + v1**2 + h**2 / lc.c_l**2 - self.c_bv) / 15.0
        a2 = (v3 + 2 * v1 * v2 + 2 * h**2 * v1 / lc.c_l**2) / 15.0
        return self._a(theta), a1, a2

    def jet(self, xi):
        """(A, A', A'') at xi; the derivatives are closed forms in h."""
        return self.a_jet_theta(self.lchart.theta_of_xi(xi))

    # X1 on the arc-length circle
    def x1(self, s):
        lc = self.lchart
        theta = lc.chart.theta_of_s(s)
        rho = lc.chart.spec.rho(theta)
        return -(rho ** (2.0 / 3.0) / lc.c_l) * self._x1(theta)

    def x1_via_a(self, s):
        lc = self.lchart
        theta = lc.chart.theta_of_s(s)
        y0 = 2.0 * lc.c_l * np.cbrt(lc.chart.spec.rho(theta))
        return -self._a(theta) * y0**2

    def z_al1(self, s):
        """Arc-length form of the correction: -X1 / (X0_dot Y0^2) at s."""
        lc = self.lchart
        return -self.x1(s) / (lc.x0_dot(s) * lc.y0(s) ** 2)


@lru_cache(maxsize=64)
def normal_form(lchart: LazutkinChart) -> NormalFormData:
    return NormalFormData(lchart)


def x1(lchart: LazutkinChart, s):
    return normal_form(lchart).x1(s)


def x1_via_a(lchart: LazutkinChart, s):
    return normal_form(lchart).x1_via_a(s)


def a_of_xi(lchart: LazutkinChart, xi):
    return normal_form(lchart).a(xi)


def a_jet(lchart: LazutkinChart, xi):
    return normal_form(lchart).jet(xi)


def _ratios(lchart: LazutkinChart, xi):
    r, r1, r2, r3 = lchart.rho_l_jet(xi)
    return r, r1 / r, r2 / r, r3 / r


def classical_coefficients(lchart: LazutkinChart, x):
    """(alpha3, alpha4, beta4) of the billiard map in classical Lazutkin coordinates."""
    c = lchart.c_l
    r, q1, q2, q3 = _ratios(lchart, x)
    alpha3 = q1**2 / 27 - q2 / 36 + 1.0 / (96 * c**2 * r ** (2.0 / 3.0))
    cubic = q1**3
    mixed = q1 * q2
    low = q1 / (c**2 * r ** (2.0 / 3.0))
    alpha4 = -4 * cubic / 135 + 11 * mixed / 270 - q3 / 90 - low / 360
    beta4 = 2 * cubic / 135 - 11 * mixed / 540 + q3 / 180 + low / 720
    return alpha3, alpha4, beta4


def _phi4_bracket(lchart: LazutkinChart, xi):
    c = lchart.c_l
    r, q1, q2, q3 = _ratios(lchart, xi)
    return (
        8 * q1**3 / 135
        - 11 * q1 * q2 / 135
        + q3 / 45
        + q1 / (180 * c**2 * r ** (2.0 / 3.0))
    )


def ode_residual(lchart: LazutkinChart, xi):
    """A'' plus the curvature terms of the second-order equation for A."""
    _, _, a2 = normal_form(lchart).jet(xi)
    return a2 + _phi4_bracket(lchart, xi)


# --- pseudocollision angles -------------------------------------------------


def _correction(lchart, correction):
    if correction is None:
        return ZeroCorrection()
    if isinstance(correction, str) and correction == "auto":
        return normal_form(lchart)
    return correction


def _solve_increment(lchart: LazutkinChart, theta0, target, iters=12):
    """Theta offset d with xi(theta0 + d) - xi(theta0) = target."""
    d = target / lchart.dxi_dtheta(theta0)
    for _ in range(iters):
        f = lchart.xi_increment(theta0, theta0 + d) - target
        step = f / lchart.dxi_dtheta(theta0 + d)
        d = d - step
        if np.all(np.abs(step) <= 1e-16 * np.maximum(np.abs(d), 1e-300)):
            break
    return d


def _rotated_chord(lchart: LazutkinChart, theta0, d, order=40):
    """exp(-i theta0) (z(theta0 + d) - z(theta0)), integrated on the arc."""
    rho = lchart.chart.spec.rho
    base = np.asarray(theta0, dtype=float)[..., None]
    return integrate_interval(
        lambda u: np.exp(1j * u) * rho(base + u), 0.0, d, order
    )


def _triple_chords(lchart, xi, eta, correction):
    corr = _correction(lchart, correction)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xi, eta = np.broadcast_arrays(xi, eta)
    a0, ap, am = corr(xi), corr(xi + eta), corr(xi - eta)
    theta0 = lchart.theta_of_xi(xi + a0 * eta**2)
    d_plus = _solve_increment(lchart, theta0, eta + (ap - a0) * eta**2)
    d_minus = _solve_increment(lchart, theta0, -eta + (am - a0) * eta**2)
    if np.any(d_plus == 0) or np.any(d_minus == 0):
        raise ValueError("coincident points in the triple (eta must be nonzero)")
    return _rotated_chord(lchart, theta0, d_plus), _rotated_chord(lchart, theta0, d_minus)


def phi_plus(lchart: LazutkinChart, xi, eta, correction=None):
    """Angle of the forward chord with the positive tangent at the middle point."""
    dz, _ = _triple_chords(lchart, xi, eta, correction)
    return np.arctan(dz.imag / dz.real)


def phi_minus(lchart: LazutkinChart, xi, eta, correction=None):
    """Angle of the backward chord with the negative tangent at the middle point."""
    _, dz = _triple_chords(lchart, xi, eta, correction)
    return -np.arctan(dz.imag / dz.real)


def pseudocollision_defect(lchart: LazutkinChart, xi, eta, correction=None):
    """phi_plus - phi_minus; even in eta."""
    dp, dm = _triple_chords(lchart, xi, eta, correction)
    return np.arctan(dp.imag / dp.real) + np.arctan(dm.imag / dm.real)


@dataclass(frozen=True)
class Phi4Estimate:
    phi2: float
    phi4: float
    condition: float


def phi4_numeric(
    lchart: LazutkinChart,
    xi: float,
    correction=None,
    eta0: float = 0.05,
    levels: int = 8,
    ratio: float = 1.3,
    terms: int = 6,
) -> Phi4Estimate:
    """eta^2 and eta^4 Taylor coefficients of phi_plus by Richardson extrapolation.

    The even part of phi_plus is half the pseudocollision defect.  It is fitted
    on the ladder eta0 / ratio^m (m < levels) by least squares with the powers
    eta^2, ..., eta^(2 terms).  A gentle ratio keeps the smallest eta far from
    round-off while the extra powers absorb the truncation tail.
    """
    eta = geometric_ladder(eta0, levels, ratio)
    even = 0.5 * pseudocollision_defect(lchart, xi, eta, correction)
    powers = 2 * np.arange(1, terms + 1)
    coef, cond = fit_power_coefficients(eta, even, powers)
    return Phi4Estimate(float(coef[0]), float(coef[1]), cond)


def phi4_closed_form(lchart: LazutkinChart, xi, correction=None):
    corr = _correction(lchart, correction)
    _, _, a2 = corr.jet(xi)
    r = lchart.rho_l(xi)
    return (a2 + _phi4_bracket(lchart, xi)) / (4 * lchart.c_l * np.cbrt(r))


# --- chord expansion coefficients -------------------------------------------


def chord_coefficients(lchart: LazutkinChart, xi: float, correction=None) -> dict:
    """Renormalized Taylor coefficients of the chord from the point xi.

    The chord runs from the point with Lazutkin coordinate xi to the point
    xi + eta + (A(xi + eta) - A(xi)) eta^2, rotated so the tangent at xi is
    horizontal.  Its real and imaginary parts are
    ``sum_j (rho^(2/3) / C_L) Ct_j eta^j`` and ``sum_j (rho^(1/3) / C_L^2) St_j eta^j``;
    this returns the St_j (keys ``S0``..``S5``) and Ct_j (``C0``..``C4``).
    """
    corr = _correction(lchart, correction)
    c = lchart.c_l
    r, q1, q2, q3 = _ratios(lchart, xi)
    _, a1, a2 = corr.jet(xi)
    low = 1.0 / (c**2 * r ** (2.0 / 3.0))
    zero = np.zeros_like(q1)
    return {
        "S0": zero,
        "S1": zero,
        "S2": zero + 0.5,
        "S3": q1 / 6,
        "S4": a1 - q1**2 / 27 + 5 * q2 / 72 - low / 24,
        "S5": a2 / 2
        + a1 * q1 / 2
        + 2 * q1**3 / 135
        - 4 * q1 * q2 / 135
        + 7 * q3 / 360
        - q1 * low / 180,
        "C0": zero,
        "C1": zero + 1.0,
        "C2": q1 / 3,
        "C3": a1 - q1**2 / 27 + q2 / 9 - low / 6,
        "C4": a2 / 2
        + 2 * q1 * a1 / 3
        + q1**3 / 81
        - q1 * q2 / 36
        + q3 / 36
        - q1 * low / 24,
    }


def chord_expansion_oracle(
    lchart: LazutkinChart,
    xi: float,
    correction=None,
    eta0: float = 0.05,
    nodes: int = 24,
    degree: int = 16,
) -> dict:
    """Same coefficients as ``chord_coefficients``, extracted numerically.

    The chord is integrated by Gauss-Legendre quadrature at Chebyshev-spaced
    eta in [-eta0, eta0] and a polynomial without constant term is fitted;
    the fitted constant term is reported as zero by construction.
    """
    corr = _correction(lchart, correction)
    c = lchart.c_l
    eta = chebyshev_nodes(eta0, nodes)
    theta0 = lchart.theta_of_xi(xi)
    a0 = corr(xi)
    d = _solve_increment(
        lchart, np.full_like(eta, theta0), eta + (corr(xi + eta) - a0) * eta**2
    )
    chord = _rotated_chord(lchart, theta0, d)
    coef, _ = fit_power_coefficients(eta, chord, np.arange(1, degree + 1))
    r = float(lchart.rho_l(xi))
    s_scale = np.cbrt(r) / c**2
    c_scale = r ** (2.0 / 3.0) / c
    out = {"S0": 0.0, "C0": 0.0}
    for j in range(1, 6):
        out[f"S{j}"] = float(coef[j - 1].imag / s_scale)
    for j in range(1, 5):
        out[f"C{j}"] = float(coef[j - 1].real / c_scale)
    return out


# --- disc test --------------------------------------------------------------


@dataclass(frozen=True)
class DiscVerdict:
    is_disc: bool
    sup_norm_x1: float
    grid: int

    def __str__(self):
        word = "DISC" if self.is_disc else "NOT A DISC"
        return f"{word} (sup|X1| = {self.sup_norm_x1:.3g})"


def disc_test(lchart: LazutkinChart, tol: float = 1e-8, grid: int = 2048) -> DiscVerdict:
    s = np.linspace(0.0, lchart.chart.length, grid, endpoint=False)
    sup = float(np.max(np.abs(x1(lchart, s))))
    return DiscVerdict(sup < tol, sup, grid)
