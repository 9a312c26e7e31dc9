"""The quartic oscillator zeta'' = -zeta^3 + zeta and the planar curves it generates.

Level sets of H = zeta_tau^2/2 + zeta^4/4 - zeta^2/2 + 1/4 with 0 < E < 1/4 are
closed orbits around zeta = 1.  A positive solution read as the function
h = rho_L^(-1/3) / (2 sqrt 2) of a curve (in units where the constant in
h'' = -h^3 + C h is normalized away) produces a curve whose tangent turns by
2 sqrt 2 int zeta dtau per period.  That integral equals 4 pi for every level,
so the curve turns twice per period and cannot close up as a convex oval.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

__all__ = [
    "PendulumLevel",
    "Trajectory",
    "GammaCurve",
    "hamiltonian",
    "turning_points",
    "period",
    "theta_integral",
    "level",
    "integrate",
    "time_of_flight",
    "gamma_curve",
    "self_intersections",
]

SQRT2 = np.sqrt(2.0)
ODE_TOL = 1e-13


def _check_energy(E, allow_zero=False):
    lo_ok = E >= 0 if allow_zero else E > 0
    if not (lo_ok and E < 0.25):
        raise ValueError(f"energy must lie in {'[' if allow_zero else '('}0, 1/4), got {E!r}")


def hamiltonian(zeta, zeta_tau):
    zeta = np.asarray(zeta, dtype=float)
    return 0.5 * np.asarray(zeta_tau) ** 2 + 0.25 * zeta**4 - 0.5 * zeta**2 + 0.25


def turning_points(E: float) -> tuple[float, float]:
    _check_energy(E)
    root = 2.0 * np.sqrt(E)
    return float(np.sqrt(1.0 - root)), float(np.sqrt(1.0 + root))


def period(E: float, tol: float = 1e-14) -> float:
    """Prime period from the substitution zeta^2 = 1 + 2 sqrt(E) sin(psi).

    The substitution turns the endpoint-singular integral into
    (sqrt 2 / 2) int_0^{2 pi} dpsi / sqrt(1 + 2 sqrt(E) sin psi), whose integrand is
    smooth and periodic, so the trapezoid rule converges geometrically.  Very
    close to E = 1/4 the integrand nearly blows up and an algebraic-weight rule
    in zeta takes over.
    """
    _check_energy(E)
    k = 2.0 * np.sqrt(E)
    n = 64
    prev = None
    while n <= 1 << 16:
        psi = np.arange(n) * (2 * np.pi / n)
        val = SQRT2 / 2 * (2 * np.pi / n) * np.sum(1.0 / np.sqrt(1.0 + k * np.sin(psi)))
        if prev is not None and abs(val - prev) <= tol * val:
            return float(val)
        prev = val
        n *= 2
    return _singular_integral(E, lambda z: 2.0 * np.ones_like(z))


def _singular_integral(E, numerator):
    # int numerator(zeta) dzeta / sqrt(2E - (zeta^2 - 1)^2 / 2) over [zeta-, zeta+]
    zm, zp = turning_points(E)

    def smooth(z):
        return numerator(z) / (SQRT2 / 2 * np.sqrt((zp + z) * (z + zm)))

    val, _ = quad(smooth, zm, zp, weight="alg", wvar=(-0.5, -0.5), epsabs=1e-15, epsrel=1e-14, limit=200)
    return float(val)


def theta_integral(E: float) -> float:
    """4 sqrt 2 int_{zeta-}^{zeta+} zeta dzeta / sqrt(2E - (zeta^2 - 1)^2 / 2).

    Computed in zeta with an algebraic-weight rule for the two inverse square
    root endpoints: 2E - (zeta^2-1)^2/2 = (zeta+ - zeta)(zeta - zeta-)(zeta+ + zeta)(zeta + zeta-)/2.
    """
    return 4.0 * SQRT2 * _singular_integral(E, lambda z: z)


@dataclass(frozen=True)
class PendulumLevel:
    E: float
    zeta_minus: float
    zeta_plus: float
    T: float
    Theta: float
    c_star: float = 1.0


def level(E: float, c_star: float = 1.0) -> PendulumLevel:
    zm, zp = turning_points(E)
    return PendulumLevel(E, zm, zp, period(E), theta_integral(E), c_star)


@dataclass(frozen=True)
class Trajectory:
    tau: np.ndarray
    zeta: np.ndarray
    zeta_tau: np.ndarray

    @property
    def H(self):
        return hamiltonian(self.zeta, self.zeta_tau)


def _rhs(c_star):
    scale = 1.0 / (8.0 * c_star**1.5)

    def f(_, y):
        z, p, th = y[0], y[1], y[2]
        speed = scale / z**2
        return [p, z - z**3, 2 * SQRT2 * z, speed * np.cos(th), speed * np.sin(th)]

    return f


def _solve(E, tau_end, c_star=1.0, stop_at_return=False):
    zp = np.sqrt(1.0 + 2.0 * np.sqrt(E))
    y0 = [zp, 0.0, 0.0, 0.0, 0.0]
    events = None
    if stop_at_return:
        half = 0.5 * period(E)

        def back_at_start(t, y):
            # zeta_tau crosses zero downward at the upper turning point; the
            # first such crossing after half a period closes the orbit
            return y[1] if t > half else -1.0

        back_at_start.terminal = True
        back_at_start.direction = -1
        events = back_at_start
    sol = solve_ivp(
        _rhs(c_star),
        (0.0, tau_end),
        y0,
        method="DOP853",
        rtol=ODE_TOL,
        atol=ODE_TOL,
        dense_output=True,
        events=events,
    )
    if sol.status < 0:
        raise RuntimeError(f"ODE integration failed: {sol.message}")
    return sol


def time_of_flight(E: float) -> tuple[float, float]:
    """Period and 2 sqrt 2 int zeta dtau measured by integrating one orbit."""
    _check_energy(E)
    sol = _solve(E, 1.5 * period(E), stop_at_return=True)
    if sol.t_events[0].size == 0:
        raise RuntimeError("trajectory did not return to its starting turning point")
    T = float(sol.t_events[0][0])
    return T, float(sol.y_events[0][0][2])


def integrate(E: float, tau_end: float | None = None, samples: int = 1001) -> Trajectory:
    """Trajectory from the upper turning point, sampled uniformly in tau.

    By default it covers one prime period.
    """
    _check_energy(E, allow_zero=True)
    if E == 0.0:
        tau_end = np.pi * SQRT2 if tau_end is None else tau_end
        tau = np.linspace(0.0, tau_end, samples)
        return Trajectory(tau, np.ones_like(tau), np.zeros_like(tau))
    if tau_end is None:
        tau_end = period(E)
    sol = _solve(E, tau_end)
    tau = np.linspace(0.0, tau_end, samples)
    y = sol.sol(tau)
    return Trajectory(tau, y[0], y[1])


@dataclass(frozen=True)
class GammaCurve:
    E: float
    c_star: float
    tau: np.ndarray
    points: np.ndarray  # complex
    turning_angle: float
    endpoint_gap: float

    def self_intersections(self) -> int:
        return self_intersections(self.points)


def gamma_curve(E: float, c_star: float = 1.0, samples: int = 2001) -> GammaCurve:
    """The curve over one period, with rho = (2 sqrt 2 h)^-3 and h = sqrt(C*) zeta(sqrt(C*) t).

    Written in tau = sqrt(C*) t: theta_tau = 2 sqrt 2 zeta and
    Gamma_tau = exp(i theta) / (8 C*^(3/2) zeta^2).  Starts at the origin with
    horizontal tangent.
    """
    _check_energy(E)
    if c_star <= 0:
        raise ValueError("C* must be positive")
    T = period(E)
    sol = _solve(E, T, c_star=c_star)
    tau = np.linspace(0.0, T, samples)
    y = sol.sol(tau)
    pts = y[3] + 1j * y[4]
    end = sol.y[:, -1]
    gap = float(abs(complex(end[3], end[4])))
    return GammaCurve(E, c_star, tau, pts, float(end[2]), gap)


def self_intersections(points: np.ndarray) -> int:
    """Number of crossings between non-adjacent segments of a polyline."""
    p = np.asarray(points)
    a, b = p[:-1], p[1:]
    d = b - a
    n = len(a)
    count = 0

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    for i in range(n - 2):
        j = slice(i + 2, n)
        c, e = a[j], d[j]
        o1 = cross(d[i], c - a[i])
        o2 = cross(d[i], c + e - a[i])
        o3 = cross(e, a[i] - c)
        o4 = cross(e, b[i] - c)
        count += int(np.sum((o1 * o2 < 0) & (o3 * o4 < 0)))
    return count
