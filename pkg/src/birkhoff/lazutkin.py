"""Lazutkin reparametrization of the boundary and the curvature integrals built on it.

The Lazutkin coordinate of the point with tangent angle theta is
``xi(theta) = C_L * int_0^theta rho^(1/3)``, which is the arc-length integral of
``rho^(-2/3)`` rewritten with ds = rho dtheta.  The circle of xi values is
normalized to period 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import BoundaryChart, reparametrize_jet
from .quadrature import (
    TWO_PI,
    PeriodicCumulative,
    integrate_interval,
    invert_monotone,
)

__all__ = [
    "LazutkinChart",
    "build_lazutkin",
    "lazutkin_curvature_jet",
    "c_bv",
    "c_bv_arc_length",
    "marvizi_melrose",
]

SQRT8 = 2.0 * np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class LazutkinChart:
    chart: BoundaryChart
    c_l: float
    c_bv: float
    _xi: PeriodicCumulative

    @property
    def spec(self):
        return self.chart.spec

    # coordinate maps
    def xi_of_theta(self, theta):
        return self.c_l * self._xi(theta)

    def theta_of_xi(self, xi):
        xi = np.asarray(xi, dtype=float)
        turns = np.floor(xi)
        red = xi - turns
        theta = invert_monotone(
            self.xi_of_theta,
            self.dxi_dtheta,
            self._xi.edges,
            self.c_l * self._xi.table,
            red,
        )
        return theta + TWO_PI * turns

    def dxi_dtheta(self, theta):
        return self.c_l * np.cbrt(self.chart.spec.rho(theta))

    def xi_increment(self, theta0, theta1):
        """xi(theta1) - xi(theta0) integrated directly over the short arc."""
        return integrate_interval(self.dxi_dtheta, theta0, theta1, 32)

    def x0(self, s):
        """Arc length to Lazutkin coordinate; X0(0) = 0 and X0(l) = 1."""
        return self.xi_of_theta(self.chart.theta_of_s(s))

    def x0_inverse(self, xi):
        return self.chart.s_of_theta(self.theta_of_xi(xi))

    def x0_dot(self, s):
        return self.c_l * self.chart.rho_al(s) ** (-2.0 / 3.0)

    def y0(self, s):
        return 2.0 * self.c_l * np.cbrt(self.chart.rho_al(s))

    # curvature in the Lazutkin parameter
    def rho_l_jet_theta(self, theta):
        """(rho_L, rho_L', rho_L'', rho_L''') at tangent angle theta."""
        f = self.chart.spec.rho_jet(theta)
        rho, r1, r2 = f[0], f[1], f[2]
        w = 1.0 / (self.c_l * np.cbrt(rho))
        w1 = -w * r1 / (3.0 * rho)
        w2 = w * (4.0 * r1**2 / (9.0 * rho**2) - r2 / (3.0 * rho))
        return np.stack(reparametrize_jet(f, (w, w1, w2)))

    def rho_l_jet(self, xi):
        return self.rho_l_jet_theta(self.theta_of_xi(xi))

    def rho_l(self, xi):
        return self.rho_l_jet(xi)[0]

    def log_h_jet_theta(self, theta):
        """h = rho_L^(-1/3) / (2 sqrt 2): returns (h, (ln h)', (ln h)'', (ln h)''')."""
        r, r1, r2, r3 = self.rho_l_jet_theta(theta)
        u1 = r1 / r
        u2 = r2 / r - u1**2
        u3 = r3 / r - 3.0 * u1 * r2 / r + 2.0 * u1**3
        h = 1.0 / (SQRT8 * np.cbrt(r))
        return h, -u1 / 3.0, -u2 / 3.0, -u3 / 3.0


def _c_bv_density(lchart: LazutkinChart, theta):
    # [(h'/h)^2 + h^2 / C_L^2] dxi/dtheta
    h, v1, _, _ = lchart.log_h_jet_theta(theta)
    return (v1**2 + h**2 / lchart.c_l**2) * lchart.dxi_dtheta(theta)


def build_lazutkin(chart: BoundaryChart) -> LazutkinChart:
    spec = chart.spec
    qtol = min(chart.tol, 1e-13)
    cum = PeriodicCumulative(lambda t: np.cbrt(spec.rho(t)), tol=qtol)
    c_l = 1.0 / cum.total
    lchart = LazutkinChart(chart=chart, c_l=c_l, c_bv=np.nan, _xi=cum)
    total = PeriodicCumulative(lambda t: _c_bv_density(lchart, t), tol=qtol).total
    object.__setattr__(lchart, "c_bv", float(total))
    return lchart


def lazutkin_curvature_jet(lchart: LazutkinChart, xi):
    return tuple(lchart.rho_l_jet(xi))


def c_bv(lchart: LazutkinChart) -> float:
    """int over the Lazutkin circle of (h'/h)^2 + h^2 / C_L^2."""
    return lchart.c_bv


def marvizi_melrose(lchart: LazutkinChart, panels: int = 256, order: int = 16):
    """(I1, I2) computed by quadrature in arc length.

    I1 = int rho^(-2/3) ds and I2 = int (8 rho_dot^2 + 9) rho^(-4/3) ds.  The
    integrals run over a uniform arc-length grid through the inverse parameter
    map, independently of the theta-based tables used elsewhere.
    """
    chart = lchart.chart
    edges = np.linspace(0.0, chart.length, panels + 1)

    def density(s):
        rho, rdot, _, _ = chart.curvature_jet(s)
        return np.stack([rho ** (-2.0 / 3.0), (8.0 * rdot**2 + 9.0) * rho ** (-4.0 / 3.0)])

    vals = integrate_interval(lambda s: density(s), edges[:-1], edges[1:], order)
    return float(np.sum(vals[0])), float(np.sum(vals[1]))


def c_bv_arc_length(lchart: LazutkinChart) -> float:
    i1, i2 = marvizi_melrose(lchart)
    return i1 * i2 / 72.0
