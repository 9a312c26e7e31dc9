"""Quadrature and series-extraction primitives shared by the geometry modules.

Everything here works on smooth periodic integrands of the tangent angle, so a
composite Gauss-Legendre rule on uniform panels converges geometrically.  The
cumulative tables let us evaluate indefinite integrals at arbitrary points with
a single partial-panel rule instead of re-integrating from the origin.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


class QuadratureError(RuntimeError):
    """Raised when a quadrature does not reach the requested tolerance."""


class ExtrapolationError(RuntimeError):
    """Raised when a Taylor-coefficient fit is too ill-conditioned to trust."""


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1] (cached; treat as read-only)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def integrate_interval(
    func: Callable[[np.ndarray], np.ndarray],
    lo,
    hi,
    order: int = 32,
) -> np.ndarray:
    """Gauss-Legendre rule on [lo, hi], vectorised over arrays of endpoints.

    ``func`` receives an array of shape ``broadcast(lo, hi).shape + (order,)``.
    """
    x, w = gauss_legendre(order)
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    width = hi - lo
    vals = func(lo + width * x)
    return np.sum(vals * w, axis=-1) * width[..., 0]


class PeriodicCumulative:
    """Indefinite integral F(t) = int_0^t f of a 2*pi-periodic integrand.

    The panel count is doubled until two rules of different order agree on the
    full-period integral to ``tol`` (relative to the integrand scale).
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        tol: float = 1e-13,
        order: int = 16,
        min_panels: int = 32,
        max_panels: int = 1 << 14,
    ):
        self.func = func
        self.order = order
        panels = min_panels
        while True:
            edges = np.linspace(0.0, TWO_PI, panels + 1)
            lo, hi = edges[:-1], edges[1:]
            fine = integrate_interval(func, lo, hi, order)
            coarse = integrate_interval(func, lo, hi, order // 2 + 2)
            scale = np.sum(np.abs(integrate_interval(lambda t: np.abs(func(t)), lo, hi, order)))
            err = abs(np.sum(fine) - np.sum(coarse))
            if err <= tol * max(scale, 1e-300):
                break
            if panels >= max_panels:
                raise QuadratureError(
                    f"periodic quadrature did not converge: error {err:.3e} "
                    f"with {panels} panels"
                )
            panels *= 2
        self.panels = panels
        self.h = TWO_PI / panels
        self.edges = edges
        self.table = np.concatenate([[0.0], np.cumsum(fine)])
        self.total = self.table[-1]

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        turns = np.floor(t / TWO_PI)
        red = t - turns * TWO_PI
        k = np.clip((red / self.h).astype(int), 0, self.panels - 1)
        start = self.edges[k]
        partial = integrate_interval(self.func, start, red, self.order)
        return turns * self.total + self.table[k] + partial


def invert_monotone(
    forward: Callable[[np.ndarray], np.ndarray],
    derivative: Callable[[np.ndarray], np.ndarray],
    grid_t: np.ndarray,
    grid_f: np.ndarray,
    target,
    tol: float = 1e-15,
    maxiter: int = 30,
) -> np.ndarray:
    """Solve forward(t) = target for an increasing function.

    A linear interpolation in the sample table gives the starting point and
    Newton iterations polish it.
    """
    target = np.asarray(target, dtype=float)
    t = np.interp(target, grid_f, grid_t)
    scale = max(float(np.max(np.abs(grid_f))), 1.0)
    for _ in range(maxiter):
        step = (forward(t) - target) / derivative(t)
        t = t - step
        if np.all(np.abs(step) <= tol * max(float(np.max(np.abs(grid_t))), 1.0)):
            return t
    resid = np.max(np.abs(forward(t) - target))
    if resid > 1e3 * tol * scale:
        raise QuadratureError(f"monotone inversion stalled, residual {resid:.3e}")
    return t


def fit_power_coefficients(
    eta: np.ndarray,
    values: np.ndarray,
    powers: Sequence[int],
    max_condition: float = 1e14,
) -> tuple[np.ndarray, float]:
    """Least-squares fit of ``values ~ sum_p c_p eta**p`` over the given powers.

    Columns are scaled by the largest |eta| before solving so the condition
    number measures the node geometry rather than the units.  Returns the
    coefficients and that condition number.  With as many nodes as powers on
    a geometric ladder this is Richardson extrapolation in matrix form.
    """
    eta = np.asarray(eta, dtype=float)
    values = np.asarray(values)
    powers = np.asarray(list(powers))
    ref = float(np.max(np.abs(eta)))
    basis = (eta[:, None] / ref) ** powers[None, :]
    cond = float(np.linalg.cond(basis))
    if not np.isfinite(cond) or cond > max_condition:
        raise ExtrapolationError(f"Taylor fit ill-conditioned (cond = {cond:.3e})")
    if np.iscomplexobj(values):
        re, *_ = np.linalg.lstsq(basis, values.real, rcond=None)
        im, *_ = np.linalg.lstsq(basis, values.imag, rcond=None)
        coef = re + 1j * im
    else:
        coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    return coef / ref**powers, cond


def geometric_ladder(eta0: float, levels: int, ratio: float = 2.0) -> np.ndarray:
    return eta0 / ratio ** np.arange(levels)


def chebyshev_nodes(half_width: float, count: int) -> np.ndarray:
    """Chebyshev points of the first kind on [-half_width, half_width].

    An even ``count`` keeps the origin out of the node set.
    """
    k = np.arange(count)
    return half_width * np.cos((2 * k + 1) * np.pi / (2 * count))
