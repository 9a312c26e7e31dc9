"""Periodic billiard orbits of rotation number 1/q and the correction they reveal.

A 1/q orbit is a critical point of the perimeter of the inscribed q-gon.  We
parametrize vertices by tangent angle, so the derivatives of z are explicit:
z' = rho e^{i theta} and z'' = (rho' + i rho) e^{i theta}.  Each side only
couples two neighbouring vertices, so the Hessian is tridiagonal with two
corner entries; fixing one vertex (the anchor) removes the corners.

In Lazutkin coordinates the vertices sit at x_k = k/q + alpha(k/q)/q^2 + O(q^-4),
and alpha is the same function as the normal-form correction A.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal, solve_banded

from .domain import BoundaryChart
from .lazutkin import LazutkinChart
from .normal_form import x1
from .quadrature import TWO_PI

__all__ = [
    "OrbitError",
    "PeriodicOrbit",
    "find_orbit",
    "extract_alpha",
    "AlphaTable",
    "alpha_table",
    "cross_validate_x1",
]

RESIDUAL_TOL = 1e-10


class OrbitError(RuntimeError):
    pass


@dataclass(frozen=True)
class PeriodicOrbit:
    q: int
    theta: np.ndarray
    s: np.ndarray
    x: np.ndarray
    perimeter: float
    residual: float
    anchored: bool
    is_maximum: bool


def _sides(chart: BoundaryChart, theta):
    nxt = np.roll(theta, -1)
    nxt[-1] += TWO_PI
    return chart.chord(theta, nxt)


def _derivatives(chart: BoundaryChart, theta):
    """Perimeter, gradient and the three Hessian diagonals (main, upper, corner)."""
    q = theta.size
    d = _sides(chart, theta)
    length = np.abs(d)
    u = d / length
    jet = chart.spec.rho_jet(theta)
    rho, rho1 = jet[0], jet[1]
    e = np.exp(1j * theta)
    w = rho * e
    ww = (rho1 + 1j * rho) * e

    def re(a, b):
        return (np.conj(a) * b).real

    # side k joins vertex k (start) and k+1 (end)
    w_next = np.roll(w, -1)
    ww_next = np.roll(ww, -1)
    start = re(u, w)
    end = re(u, w_next)
    grad = -start + np.roll(end, 1)
    main = (np.abs(w) ** 2 - start**2) / length - re(u, ww)
    main_end = (np.abs(w_next) ** 2 - end**2) / length + re(u, ww_next)
    diag = main + np.roll(main_end, 1)
    off = -(re(w, w_next) - start * end) / length  # couples k and k+1
    return float(np.sum(length)), grad, diag, off, q


def _residual(chart: BoundaryChart, theta):
    d = _sides(chart, theta)
    e = np.exp(-1j * theta)
    out_angle = np.angle(d * e)
    in_angle = np.angle(np.roll(d, 1) * e)
    return float(np.max(np.abs(out_angle + in_angle)))


def _ordered(theta):
    gaps = np.diff(np.append(theta, theta[0] + TWO_PI))
    return bool(np.all(gaps > 0))


def _newton_step(grad, diag, off, anchored):
    q = grad.size
    if anchored:
        g = grad[1:]
        ab = np.zeros((3, q - 1))
        ab[0, 1:] = off[1:-1]
        ab[1] = diag[1:]
        ab[2, :-1] = off[1:-1]
        step = np.zeros(q)
        step[1:] = -solve_banded((1, 1), ab, g)
        return step
    h = np.diag(diag) + np.diag(off[:-1], 1) + np.diag(off[:-1], -1)
    h[0, -1] += off[-1]
    h[-1, 0] += off[-1]
    return -np.linalg.solve(h, grad)


def _coordinate_sweeps(chart, theta, anchored, sweeps):
    """Monotone coordinate ascent: one safeguarded 1D Newton move per vertex."""
    q = theta.size
    for _ in range(sweeps):
        for k in range(1 if anchored else 0, q):
            _, grad, diag, _, _ = _derivatives(chart, theta)
            lo = theta[k - 1] if k > 0 else theta[-1] - TWO_PI
            hi = theta[k + 1] if k < q - 1 else theta[0] + TWO_PI
            move = -grad[k] / diag[k] if diag[k] < 0 else np.sign(grad[k]) * 0.25 * (hi - lo)
            theta[k] = np.clip(theta[k] + move, lo + 0.1 * (theta[k] - lo), hi - 0.1 * (hi - theta[k]))
    return theta


def find_orbit(
    chart: BoundaryChart,
    lchart: LazutkinChart,
    q: int,
    anchor: float | None = 0.0,
    maxiter: int = 60,
) -> PeriodicOrbit:
    """Perimeter-maximizing 1/q orbit, optionally with s_0 pinned at ``anchor``.

    Vertices start at Lazutkin-equidistributed points.  Newton iterations on
    the gradient are damped to keep the polygon ordered and the perimeter
    non-decreasing; on failure a few coordinate-ascent sweeps reset the
    iterate before Newton resumes.
    """
    if q < 3:
        raise ValueError("q must be at least 3")
    s0 = 0.0 if anchor is None else float(anchor)
    x_start = lchart.x0(s0)
    theta = lchart.theta_of_xi(x_start + np.arange(q) / q)
    if anchor is not None:
        theta[0] = chart.theta_of_s(s0)
    anchored = anchor is not None
    if q < 8:
        theta = _coordinate_sweeps(chart, theta, anchored, 5)

    best = np.inf
    restarts = 0
    for _ in range(maxiter):
        perim, grad, diag, off, _ = _derivatives(chart, theta)
        gnorm = np.max(np.abs(grad[1:] if anchored else grad))
        best = min(best, gnorm)
        if gnorm < 1e-15 * max(perim, 1.0):
            break
        try:
            step = _newton_step(grad, diag, off, anchored)
        except (np.linalg.LinAlgError, ValueError):
            step = np.full(q, np.nan)
        accepted = False
        t = 1.0
        while np.all(np.isfinite(step)) and t > 1e-4:
            trial = theta + t * step
            if _ordered(trial):
                tp, tg, *_ = _derivatives(chart, trial)
                tgn = np.max(np.abs(tg[1:] if anchored else tg))
                if tp >= perim - 1e-14 * perim or tgn < gnorm:
                    theta = trial
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            restarts += 1
            if restarts > 3:
                break
            theta = _coordinate_sweeps(chart, theta, anchored, 5)
        elif np.max(np.abs(t * step)) < 1e-16:
            break

    residual = _residual(chart, theta)
    if residual >= RESIDUAL_TOL:
        raise OrbitError(
            f"q = {q}: orbit solver did not converge (reflection residual {residual:.3e}, "
            f"best gradient {best:.3e})"
        )
    perim, _, diag, off, _ = _derivatives(chart, theta)
    if anchored:
        eig = eigvalsh_tridiagonal(diag[1:], off[1:-1])
    else:
        h = np.diag(diag) + np.diag(off[:-1], 1) + np.diag(off[:-1], -1)
        h[0, -1] += off[-1]
        h[-1, 0] += off[-1]
        eig = np.linalg.eigvalsh(h)
    s = chart.s_of_theta(theta)
    x = lchart.xi_of_theta(theta)
    return PeriodicOrbit(
        q=q,
        theta=theta,
        s=s,
        x=x,
        perimeter=perim,
        residual=residual,
        anchored=anchored,
        is_maximum=bool(np.max(eig) < 0),
    )


def extract_alpha(orbit: PeriodicOrbit) -> tuple[np.ndarray, np.ndarray]:
    """Samples (k/q, (x_k - x_0 - k/q) q^2)."""
    q = orbit.q
    frac = np.arange(q) / q
    return frac, (orbit.x - orbit.x[0] - frac) * q**2


@dataclass(frozen=True)
class AlphaTable:
    ladder: tuple
    frac: np.ndarray  # k / q on the coarsest grid
    alpha_hat: np.ndarray  # shape (len(ladder), len(frac))
    extrapolated: np.ndarray
    orbits: tuple

    def doubling_ratios(self, index: int) -> np.ndarray:
        """|a(q) - a(2q)| / |a(2q) - a(4q)| at one coarse-grid sample."""
        diffs = np.abs(np.diff(self.alpha_hat[:, index]))
        return diffs[:-1] / diffs[1:]


def alpha_table(chart: BoundaryChart, lchart: LazutkinChart, ladder=(32, 64, 128), anchor=0.0) -> AlphaTable:
    """alpha-hat on the coarsest grid for each q, plus the Richardson limit.

    The ladder must be a doubling sequence.  With two levels the limit is
    (4 a(2q) - a(q)) / 3; with three or more, the last three are combined to
    also cancel the q^-4 term.
    """
    ladder = tuple(int(q) for q in ladder)
    if len(ladder) < 2 or any(b != 2 * a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("q-ladder must be a doubling sequence of length >= 2")
    q0 = ladder[0]
    orbits = tuple(find_orbit(chart, lchart, q, anchor) for q in ladder)
    rows = []
    for orb in orbits:
        _, a = extract_alpha(orb)
        rows.append(a[:: orb.q // q0])
    rows = np.array(rows)
    if len(ladder) == 2:
        extra = (4 * rows[1] - rows[0]) / 3
    else:
        a1, a2, a3 = rows[-3], rows[-2], rows[-1]
        extra = (64 * a3 - 20 * a2 + a1) / 45
    return AlphaTable(ladder, np.arange(q0) / q0, rows, extra, orbits)


def cross_validate_x1(chart: BoundaryChart, lchart: LazutkinChart, table: AlphaTable) -> dict:
    """Compare -alpha(X0(s)) Y0(s)^2 with X1(s) at s = X0^-1(k/q).

    The deviation is reported relative to the largest |X1| among the samples,
    since X1 vanishes at isolated points.  If that maximum is below 1e-12
    (a disc) the absolute deviation is returned instead.
    """
    xi0 = table.orbits[0].x[0]
    s = lchart.x0_inverse(xi0 + table.frac)
    predicted = -table.extrapolated * lchart.y0(s) ** 2
    actual = x1(lchart, s)
    interior = slice(1, None)
    dev = np.abs(predicted - actual)[interior]
    scale = float(np.max(np.abs(actual)))
    relative = scale > 1e-12
    value = float(np.max(dev) / scale) if relative else float(np.max(dev))
    return {
        "s": s,
        "predicted": predicted,
        "x1": actual,
        "max_deviation": value,
        "relative": relative,
    }
