"""Strictly convex domains and their arc-length geometry.

A domain is described by its radius of curvature as a function of the tangent
angle theta.  Closure of the boundary is then automatic (no first harmonic) and
strict convexity is just positivity, so every shape here is built from a
``rho(theta)`` jet and the monotone map ``s(theta) = int_0^theta rho``.

The point ``s = 0`` is the point with horizontal, positively oriented tangent
(theta = 0); it sits at the origin and the domain lies in the upper half plane.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .quadrature import (
    TWO_PI,
    PeriodicCumulative,
    QuadratureError,
    integrate_interval,
    invert_monotone,
)

__all__ = [
    "DomainError",
    "Disc",
    "Ellipse",
    "FourierDomain",
    "DomainSpec",
    "BoundaryChart",
    "build_chart",
    "curvature_jet",
    "point_and_tangent",
    "parse_domain",
    "load_domain",
    "reparametrize_jet",
    "is_axially_symmetric",
    "BUILTIN_SPECS",
]


class DomainError(ValueError):
    """Invalid domain description."""


def reparametrize_jet(f_jet, w_jet):
    """Derivatives of f with respect to a new parameter u.

    ``f_jet`` holds f and its first three theta-derivatives, ``w_jet`` holds
    w = dtheta/du and its first two theta-derivatives.  Returns
    (f, f_u, f_uu, f_uuu).
    """
    f, f1, f2, f3 = f_jet
    w, w1, w2 = w_jet
    g1 = w * f1
    g2 = w * w1 * f1 + w * w * f2
    g3 = w * (w1 * w1 + w * w2) * f1 + 3 * w * w * w1 * f2 + w**3 * f3
    return f, g1, g2, g3


class _Shape:
    kind: str

    def rho_jet(self, theta) -> np.ndarray:
        """rho and its first three theta-derivatives, stacked on axis 0."""
        raise NotImplementedError

    def rho(self, theta) -> np.ndarray:
        return self.rho_jet(theta)[0]

    def to_text(self) -> str:
        raise NotImplementedError

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:12]

    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Disc(_Shape):
    radius: float
    kind = "disc"

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError(f"disc radius must be positive, got {self.radius}")

    def rho_jet(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((4,) + theta.shape)
        out[0] = self.radius
        return out

    def to_text(self):
        return f"type = disc\nradius = {self.radius!r}\n"

    def label(self):
        return f"disc{{r={self.radius:g}}}"


@dataclass(frozen=True)
class Ellipse(_Shape):
    """Ellipse with semi-axis ``a`` along x and ``b`` along y.

    rho(theta) = a^2 b^2 / (a^2 sin^2 theta + b^2 cos^2 theta)^(3/2).
    """

    a: float
    b: float
    kind = "ellipse"

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"ellipse semi-axis {name} must be positive, got {v}")

    def rho_jet(self, theta):
        theta = np.asarray(theta, dtype=float)
        a2, b2 = self.a**2, self.b**2
        mean, half = 0.5 * (a2 + b2), 0.5 * (b2 - a2)
        c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
        q = mean + half * c2
        q1 = -2 * half * s2
        q2 = -4 * half * c2
        q3 = 8 * half * s2
        k = a2 * b2
        f0 = k * q**-1.5
        f1 = -1.5 * f0 / q
        f2 = 3.75 * f0 / q**2
        f3 = -13.125 * f0 / q**3
        return np.stack(
            [
                f0,
                f1 * q1,
                f2 * q1**2 + f1 * q2,
                f3 * q1**3 + 3 * f2 * q1 * q2 + f1 * q3,
            ]
        )

    def exact_point(self, theta):
        """Closed-form boundary point with tangent angle theta (z(0) = 0)."""
        theta = np.asarray(theta, dtype=float)
        q = self.a**2 * np.sin(theta) ** 2 + self.b**2 * np.cos(theta) ** 2
        x = self.a**2 * np.sin(theta) / np.sqrt(q)
        y = -self.b**2 * np.cos(theta) / np.sqrt(q) + self.b
        return x + 1j * y

    def to_text(self):
        return f"type = ellipse\na = {self.a!r}\nb = {self.b!r}\n"

    def label(self):
        return f"ellipse{{{self.a:g},{self.b:g}}}"


@dataclass(frozen=True)
class FourierDomain(_Shape):
    """rho(theta) = c0 + sum_k (a_k cos k theta + b_k sin k theta), k >= 2."""

    c0: float
    harmonics: tuple = field(default_factory=tuple)
    kind = "fourier"

    def __post_init__(self):
        if not (self.c0 > 0 and math.isfinite(self.c0)):
            raise DomainError(f"fourier c0 must be positive, got {self.c0}")
        cleaned = []
        for item in self.harmonics:
            if len(item) != 3:
                raise DomainError(f"harmonic must be (k, a_k, b_k), got {item!r}")
            k, ak, bk = item
            if int(k) != k or k < 2:
                raise DomainError(
                    f"harmonic order must be an integer >= 2 (k = 1 would open the curve), got {k}"
                )
            cleaned.append((int(k), float(ak), float(bk)))
        object.__setattr__(self, "harmonics", tuple(cleaned))
        kmax = max([k for k, _, _ in cleaned], default=1)
        grid = np.linspace(0.0, TWO_PI, max(4096, 64 * kmax), endpoint=False)
        rho = self.rho(grid)
        i = int(np.argmin(rho))
        if rho[i] <= 0:
            raise DomainError(
                f"radius of curvature is not positive: rho = {rho[i]:.6g} at theta = {grid[i]:.6f}"
            )

    def rho_jet(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros((4,) + theta.shape)
        out[0] = self.c0
        for k, ak, bk in self.harmonics:
            c, s = np.cos(k * theta), np.sin(k * theta)
            out[0] += ak * c + bk * s
            out[1] += k * (-ak * s + bk * c)
            out[2] += k**2 * (-ak * c - bk * s)
            out[3] += k**3 * (ak * s - bk * c)
        return out

    def to_text(self):
        lines = ["type = fourier", f"c0 = {self.c0!r}"]
        lines += [f"harmonic = {k} {ak!r} {bk!r}" for k, ak, bk in self.harmonics]
        return "\n".join(lines) + "\n"

    def label(self):
        terms = []
        for k, ak, bk in self.harmonics:
            if ak:
                terms.append(f"a{k}={ak:g}")
            if bk:
                terms.append(f"b{k}={bk:g}")
        return "fourier{c0=%g%s}" % (self.c0, "".join("," + t for t in terms))


DomainSpec = Union[Disc, Ellipse, FourierDomain]


def parse_domain(text: str) -> DomainSpec:
    """Parse the flat ``key = value`` domain format.

    Blank lines and ``#`` comments are ignored; ``harmonic = k a_k b_k`` may
    repeat.  Unknown or duplicated keys are rejected.
    """
    values: dict[str, str] = {}
    harmonics = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key == "harmonic":
            parts = value.split()
            if len(parts) != 3:
                raise DomainError(f"line {lineno}: harmonic needs 'k a_k b_k', got {value!r}")
            try:
                harmonics.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise DomainError(f"line {lineno}: {exc}") from None
            continue
        if key not in {"type", "radius", "a", "b", "c0"}:
            raise DomainError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise DomainError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value.strip().strip('"').strip("'")

    kind = values.pop("type", None)
    if kind is None:
        raise DomainError("missing 'type'")
    kind = kind.lower()
    allowed = {"disc": {"radius"}, "ellipse": {"a", "b"}, "fourier": {"c0"}}
    if kind not in allowed:
        raise DomainError(f"unknown domain type {kind!r}")
    extra = set(values) - allowed[kind]
    if extra:
        raise DomainError(f"keys {sorted(extra)} not valid for type {kind}")
    missing = allowed[kind] - set(values)
    if missing:
        raise DomainError(f"missing keys {sorted(missing)} for type {kind}")
    if harmonics and kind != "fourier":
        raise DomainError("harmonic lines are only valid for type fourier")
    try:
        nums = {k: float(v) for k, v in values.items()}
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    if kind == "disc":
        return Disc(nums["radius"])
    if kind == "ellipse":
        return Ellipse(nums["a"], nums["b"])
    return FourierDomain(nums["c0"], tuple(harmonics))


def load_domain(path) -> DomainSpec:
    return parse_domain(Path(path).read_text())


class BoundaryChart:
    """Arc-length geometry of a domain boundary.

    Values are immutable after construction.  ``s`` arguments are read modulo
    the perimeter; theta values are unwrapped so that theta(s + l) = theta(s) + 2 pi.
    """

    def __init__(self, spec: DomainSpec, tol: float = 1e-10):
        if tol <= 0:
            raise ValueError("tol must be positive")
        self.spec = spec
        self.tol = tol
        qtol = min(tol, 1e-13)
        try:
            self._s = PeriodicCumulative(spec.rho, tol=qtol)
            self._z = PeriodicCumulative(
                lambda t: np.exp(1j * t) * spec.rho(t), tol=qtol
            )
        except QuadratureError as exc:
            raise DomainError(f"quadrature failed while building chart: {exc}") from exc
        self.length = float(self._s.total.real)
        self.panel_width = self._s.h
        self._grid_theta = self._s.edges
        self._grid_s = self._s.table.real

    def __repr__(self):
        return f"BoundaryChart({self.spec.label()}, length={self.length:.12g})"

    # parameter conversions
    def s_of_theta(self, theta):
        return self._s(theta).real

    def theta_of_s(self, s):
        s = np.asarray(s, dtype=float)
        turns = np.floor(s / self.length)
        red = s - turns * self.length
        theta = invert_monotone(
            self.s_of_theta, self.spec.rho, self._grid_theta, self._grid_s, red
        )
        return theta + TWO_PI * turns

    # geometry
    def z_of_theta(self, theta):
        return self._z(theta)

    def chord(self, theta0, theta1):
        """z(theta1) - z(theta0), integrated directly for short arcs."""
        theta0 = np.asarray(theta0, dtype=float)
        theta1 = np.asarray(theta1, dtype=float)
        theta0, theta1 = np.broadcast_arrays(theta0, theta1)
        out = np.empty(theta0.shape, dtype=complex)
        short = np.abs(theta1 - theta0) <= 2 * self.panel_width
        if np.any(short):
            t0 = theta0[short]
            out[short] = integrate_interval(
                lambda t: np.exp(1j * t) * self.spec.rho(t), t0, theta1[short], 32
            )
        if np.any(~short):
            out[~short] = self._z(theta1[~short]) - self._z(theta0[~short])
        return out

    def point(self, s):
        return self.z_of_theta(self.theta_of_s(s))

    def tangent_angle(self, s):
        return self.theta_of_s(s)

    def rho_al(self, s):
        return self.spec.rho(self.theta_of_s(s))

    def curvature_jet_theta(self, theta):
        """(rho, rho_s, rho_ss, rho_sss) at tangent angle theta."""
        f = self.spec.rho_jet(theta)
        rho, r1, r2 = f[0], f[1], f[2]
        w = (1.0 / rho, -r1 / rho**2, 2 * r1**2 / rho**3 - r2 / rho**2)
        return np.stack(reparametrize_jet(f, w))

    def curvature_jet(self, s):
        return self.curvature_jet_theta(self.theta_of_s(s))


def build_chart(spec: DomainSpec, tol: float = 1e-10) -> BoundaryChart:
    return BoundaryChart(spec, tol)


def curvature_jet(chart: BoundaryChart, s):
    """(rho, rho', rho'', rho''') in arc length at s, from the exact theta jet."""
    return tuple(chart.curvature_jet(s))


def point_and_tangent(chart: BoundaryChart, s):
    theta = chart.theta_of_s(s)
    return chart.z_of_theta(theta), theta


def is_axially_symmetric(spec: DomainSpec) -> bool:
    """True when the boundary is symmetric about the normal line at s = 0."""
    if isinstance(spec, FourierDomain):
        return all(bk == 0 for _, _, bk in spec.harmonics)
    return True


BUILTIN_SPECS = {
    "disc-0.5": Disc(0.5),
    "disc-1": Disc(1.0),
    "disc-3": Disc(3.0),
    "ellipse-1-1.05": Ellipse(1.0, 1.05),
    "ellipse-1-1.2": Ellipse(1.0, 1.2),
    "ellipse-1-1.3": Ellipse(1.0, 1.3),
    "fourier-a2": FourierDomain(1.0, ((2, 0.05, 0.0),)),
    "fourier-a3": FourierDomain(1.0, ((3, 0.02, 0.0),)),
}
