"""The billiard map on the phase cylinder.

The next collision is found in the tangent-angle parameter.  Leaving the point
with tangent angle t0 in direction t0 + phi, the signed distance of z(t) from
the chord line, g(t) = Im[exp(-i(t0 + phi)) (z(t) - z(t0))], has derivative
rho(t) sin(t - t0 - phi).  So g is strictly increasing on
(t0 + phi, t0 + phi + pi), negative at the left end and positive at the right
end: the root is bracketed without any sampling, and the outgoing angle at
the new point is simply t1 - t0 - phi.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import BoundaryChart

__all__ = [
    "GRAZING_LIMIT",
    "BilliardError",
    "PhaseState",
    "step",
    "step_back",
    "orbit",
    "step_arrays",
    "reflection_residual",
]

GRAZING_LIMIT = 1e-8


class BilliardError(RuntimeError):
    pass


@dataclass(frozen=True)
class PhaseState:
    s: float
    phi: float

    def __post_init__(self):
        if not (GRAZING_LIMIT <= self.phi <= np.pi - GRAZING_LIMIT):
            raise ValueError(
                f"phi = {self.phi!r} is outside ({GRAZING_LIMIT}, pi - {GRAZING_LIMIT})"
            )

    def reversed(self) -> "PhaseState":
        return PhaseState(self.s, np.pi - self.phi)


def _next_theta(chart: BoundaryChart, theta0, phi, maxiter=100):
    direction = np.exp(-1j * (theta0 + phi))
    rho = chart.spec.rho

    def g(t):
        return (direction * chart.chord(theta0, t)).imag

    lo = theta0 + phi
    hi = theta0 + phi + np.pi
    t = 0.5 * (lo + hi)
    done = np.zeros(np.shape(t), dtype=bool)
    eps = np.finfo(float).eps
    for _ in range(maxiter):
        gt = g(t)
        lo = np.where(gt < 0, t, lo)
        hi = np.where(gt > 0, t, hi)
        slope = rho(t) * np.sin(t - theta0 - phi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = gt / slope
            # g is only known to about eps times the chord length, which
            # limits how well the root is defined when the slope is small
            noise = 4 * eps * (np.abs(t) + np.abs(chart.chord(theta0, t)) / np.abs(slope))
        newton = t - step
        # a step at the noise level means t is already the root; this is
        # tested before the bracket, since t may sit on lo or hi
        done = done | (gt == 0) | (np.abs(step) <= noise)
        inside = (newton > lo) & (newton < hi) & np.isfinite(newton)
        t = np.where(done, t, np.where(inside, newton, 0.5 * (lo + hi)))
        if np.all(done):
            return t
    width = np.where(done, 0.0, hi - lo)
    if np.max(width) > 1e-12:
        raise BilliardError(f"collision root not converged; bracket width {np.max(width):.3e}")
    return t


def step_arrays(chart: BoundaryChart, s, phi):
    """Vectorized billiard map; returns (s', phi') with s' reduced mod l."""
    s = np.asarray(s, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any((phi < GRAZING_LIMIT) | (phi > np.pi - GRAZING_LIMIT)):
        raise BilliardError("grazing or invalid angle; phi must lie in (1e-8, pi - 1e-8)")
    theta0 = chart.theta_of_s(s)
    theta1 = _next_theta(chart, theta0, phi)
    s1 = np.mod(chart.s_of_theta(theta1), chart.length)
    return s1, theta1 - theta0 - phi


def step(chart: BoundaryChart, state: PhaseState) -> PhaseState:
    s1, phi1 = step_arrays(chart, state.s, state.phi)
    return PhaseState(float(s1), float(phi1))


def step_back(chart: BoundaryChart, state: PhaseState) -> PhaseState:
    """Inverse map through the time reversal (s, phi) -> (s, pi - phi)."""
    return step(chart, state.reversed()).reversed()


def orbit(chart: BoundaryChart, state: PhaseState, n: int) -> list[PhaseState]:
    """The n forward iterates f(x), ..., f^n(x)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = []
    for _ in range(n):
        state = step(chart, state)
        out.append(state)
    return out


def reflection_residual(chart: BoundaryChart, s, phi, s1, phi1):
    """Angle mismatch of a computed bounce, re-derived from the geometry.

    Checks that the chord z(s) -> z(s1) leaves at angle phi from the tangent at
    s and meets the tangent at s1 at angle phi1.
    """
    t0 = chart.theta_of_s(s)
    t1 = chart.theta_of_s(s1)
    t1 = t1 + 2 * np.pi * np.round((t0 + phi + phi1 - t1) / (2 * np.pi))
    c = chart.chord(t0, t1)
    out_angle = np.angle(c * np.exp(-1j * t0))
    in_angle = np.angle(c * np.exp(-1j * t1))
    res_out = np.abs(out_angle - phi)
    res_in = np.abs(-in_angle - phi1)
    return np.maximum(res_out, res_in)
