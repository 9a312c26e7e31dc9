"""Acceptance checks and per-domain verification reports.

Each numbered criterion returns a ``Check``; ``run_acceptance`` runs them all
and ``domain_checks`` runs the subset that makes sense for one input domain.
Runtime budgets are part of several criteria and are enforced here.
"""
from __future__ import annotations

import tempfile
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import billiard, normal_form as nf, orbits, pendulum
from .domain import (
    BUILTIN_SPECS,
    Disc,
    Ellipse,
    build_chart,
    is_axially_symmetric,
)
from .lazutkin import build_lazutkin, c_bv_arc_length
from .output import svg_document, write_text
from .quadrature import PeriodicCumulative, integrate_interval

__all__ = ["Check", "CRITERIA", "run_acceptance", "domain_checks", "format_report"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(name: str, budget: float | None, body: Callable[[], tuple[bool, str]]) -> Check:
    start = time.perf_counter()
    try:
        ok, detail = body()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if budget is not None and elapsed > budget:
        ok = False
        detail += f"; runtime {elapsed:.2f} s over budget {budget:g} s"
    return Check(name, bool(ok), detail, elapsed)


def _lazutkin(spec):
    return build_lazutkin(build_chart(spec))


def _sup_x1(spec, grid=2048):
    lc = _lazutkin(spec)
    return nf.disc_test(lc, grid=grid).sup_norm_x1


def _rel(a, b, floor=1.0):
    return np.abs(a - b) / np.maximum(np.abs(b), floor)


# --- criteria ---------------------------------------------------------------


def criterion_1() -> Check:
    def body():
        sups = {r: _sup_x1(Disc(r)) for r in (0.5, 1.0, 3.0)}
        ok = all(v < 1e-10 for v in sups.values())
        return ok, "sup|X1| " + ", ".join(f"r={r:g}: {v:.2e}" for r, v in sups.items())

    return _timed("1 disc gives X1 = 0", 3.0, body)


def criterion_2() -> Check:
    specs = [Ellipse(1, 1.05), Ellipse(1, 1.2), BUILTIN_SPECS["fourier-a2"], BUILTIN_SPECS["fourier-a3"]]

    def body():
        sups = {s.label(): _sup_x1(s) for s in specs}
        ok = all(v > 1e-4 for v in sups.values())
        return ok, "sup|X1| " + ", ".join(f"{k}: {v:.3e}" for k, v in sups.items())

    return _timed("2 non-discs give X1 != 0", 4.0, body)


def criterion_3() -> Check:
    def body():
        energies = np.logspace(-4, np.log10(0.24), 20)
        quad_err = max(abs(pendulum.theta_integral(E) - 4 * np.pi) for E in energies)
        flights = [pendulum.time_of_flight(E)[1] for E in energies]
        ode_err = max(abs(v - 4 * np.pi) for v in flights)
        agree = max(abs(v - pendulum.theta_integral(E)) for v, E in zip(flights, energies))
        ok = quad_err < 1e-8 and ode_err < 1e-8 and agree < 1e-7
        return ok, (
            f"max |Theta - 4pi| quadrature {quad_err:.1e}, trajectory {ode_err:.1e}; "
            f"agreement {agree:.1e}"
        )

    return _timed("3 Theta(E) = 4 pi", 5.0, body)


def criterion_4() -> Check:
    def body():
        err = abs(pendulum.period(1e-6) - np.pi * np.sqrt(2))
        traj = pendulum.integrate(0.04, samples=4001)
        drift = float(np.max(np.abs(traj.H - 0.04)))
        return err < 1e-4 and drift < 1e-9, f"|T(1e-6) - pi sqrt2| = {err:.2e}; H drift {drift:.1e}"

    return _timed("4 small-amplitude period, energy drift", 2.0, body)


def gamma_svg(curves) -> str:
    colours = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    paths, markers = [], []
    for i, g in enumerate(curves):
        colour = colours[i % len(colours)]
        paths.append((g.points, {"stroke": colour}))
        markers.append((g.points[0], "", "black"))
        markers.append((g.points[-1], f"E={g.E:g}", colour))
    caption = "Gamma over one period; tangent turns by 4 pi; " + ", ".join(
        f"gap(E={g.E:g}) = {g.endpoint_gap:.3g}" for g in curves
    )
    return svg_document(paths, markers, caption)


def criterion_5(svg_path=None) -> Check:
    def body():
        curves = [pendulum.gamma_curve(E) for E in (0.005, 0.02, 0.05)]
        turn = max(abs(g.turning_angle - 4 * np.pi) for g in curves)
        gap = min(g.endpoint_gap for g in curves)
        target = Path(svg_path) if svg_path else Path(tempfile.mkdtemp()) / "gamma.svg"
        write_text(target, gamma_svg(curves))
        root = ET.parse(target).getroot()
        n_lines = sum(1 for el in root.iter() if el.tag.endswith("polyline"))
        ok = turn < 1e-6 and gap > 1e-3 and n_lines == 3
        return ok, (
            f"max |turning - 4pi| {turn:.1e}; min endpoint gap {gap:.3e}; "
            f"SVG with {n_lines} curves at {target}"
        )

    return _timed("5 Gamma curves turn by 4 pi and do not close", 3.0, body)


def criterion_6() -> Check:
    def body():
        lc = _lazutkin(Ellipse(1, 1.2))
        xi = (np.arange(64) + 0.5) / 64
        _, a4, b4 = nf.classical_coefficients(lc, xi)
        ident = float(np.max(np.abs(b4 + a4 / 2)))
        _, _, a2 = nf.a_jet(lc, xi)
        rel = float(np.max(np.abs(a2 / 4 + b4)) / np.max(np.abs(b4)))
        return ident < 1e-12 and rel < 1e-8, f"|b4 + a4/2| {ident:.1e}; A''/4 + b4 relative {rel:.1e}"

    return _timed("6 classical-coefficient identities", 2.0, body)


def chord_errors(lc, points, correction=None):
    """Largest relative mismatch between closed forms and the chord oracle."""
    worst = 0.0
    for xi in points:
        closed = nf.chord_coefficients(lc, xi, correction)
        oracle = nf.chord_expansion_oracle(lc, xi, correction)
        for key in nf.CHORD_KEYS:
            worst = max(worst, float(_rel(oracle[key], float(closed[key]))))
    return worst


def criterion_7() -> Check:
    def body():
        lc = _lazutkin(Ellipse(1, 1.3))
        points = (np.arange(8) + 0.37) / 8
        err0 = chord_errors(lc, points)
        err_a = chord_errors(lc, points, "auto")
        dc = _lazutkin(Disc(1.0))
        disc_err = 0.0
        for xi in points:
            c = nf.chord_coefficients(dc, xi)
            disc_err = max(
                disc_err,
                abs(c["S2"] - 0.5),
                abs(c["C1"] - 1.0),
                abs(c["S3"]),
                abs(c["C2"]),
            )
        ok = err0 < 1e-6 and err_a < 1e-6 and disc_err < 1e-12
        return ok, (
            f"max relative error A=0 {err0:.1e}, A from normal form {err_a:.1e}; "
            f"disc specialization {disc_err:.1e}"
        )

    return _timed("7 chord expansion coefficients", 10.0, body)


def _slope(eta, values):
    return float(np.polyfit(np.log(eta), np.log(np.abs(values)), 1)[0])


class _IntegratedCorrection:
    """Periodic correction with prescribed derivative density (a test double)."""

    def __init__(self, lc, a_prime_theta):
        raw = PeriodicCumulative(lambda t: a_prime_theta(t) * lc.dxi_dtheta(t), tol=1e-13)
        self.mean = raw.total
        self.lc = lc
        self._a = PeriodicCumulative(
            lambda t: (a_prime_theta(t) - self.mean) * lc.dxi_dtheta(t), tol=1e-13
        )

    def __call__(self, xi):
        return self._a(self.lc.theta_of_xi(xi))


def adjudicate_constants(lc, xi=0.2) -> dict:
    """Compare competing constants against the chord-angle oracle.

    Returns the oracle value of the eta^4 coefficient with A = 0 alongside the
    closed form using (r'/r)^3 and the variant using (r'/r^3)^3; and |phi4|
    with A built from the h^2 / C_L^2 term versus the h^2 / C_L variant.
    """
    est = nf.phi4_numeric(lc, xi)
    r, r1, r2, r3 = lc.rho_l_jet(xi)
    good = nf.phi4_closed_form(lc, xi)
    variant = good + (8 / 135) * ((r1 / r**3) ** 3 - (r1 / r) ** 3) / (4 * lc.c_l * np.cbrt(r))

    def a_prime_variant(theta):
        h, v1, v2, _ = lc.log_h_jet_theta(theta)
        return (v2 + v1**2 + h**2 / lc.c_l) / 15.0

    wrong_a = _IntegratedCorrection(lc, a_prime_variant)
    return {
        "oracle_phi4": est.phi4,
        "closed_phi4": float(good),
        "variant_phi4": float(variant),
        "phi4_with_A": nf.phi4_numeric(lc, xi, "auto").phi4,
        "phi4_with_variant_A": nf.phi4_numeric(lc, xi, wrong_a).phi4,
    }


def criterion_8() -> Check:
    def body():
        lc = _lazutkin(Ellipse(1, 1.2))
        points = (np.arange(8) + 0.2) / 8
        phi2 = 0.0
        rel4 = 0.0
        with_a = 0.0
        for xi in points:
            e0 = nf.phi4_numeric(lc, xi)
            ea = nf.phi4_numeric(lc, xi, "auto")
            phi2 = max(phi2, abs(e0.phi2), abs(ea.phi2))
            rel4 = max(rel4, float(_rel(e0.phi4, nf.phi4_closed_form(lc, xi), 1e-12)))
            with_a = max(with_a, abs(ea.phi4))
        eta = np.array([0.02, 0.01, 0.005])
        slope6 = _slope(eta, nf.pseudocollision_defect(lc, 0.37, eta, "auto"))
        slope4 = _slope(eta, nf.pseudocollision_defect(lc, 0.37, eta))
        adj = adjudicate_constants(lc)
        variant_rel = abs(adj["variant_phi4"] / adj["oracle_phi4"] - 1)
        ok = (
            phi2 < 1e-8
            and rel4 < 1e-5
            and with_a < 1e-6
            and abs(slope6 - 6) <= 0.3
            and abs(slope4 - 4) <= 0.2
            and variant_rel > 1e-3
            and abs(adj["phi4_with_variant_A"]) > 1e-3
        )
        return ok, (
            f"|phi2| {phi2:.1e}; phi4 vs closed form {rel4:.1e}; |phi4| with A {with_a:.1e}; "
            f"defect slopes {slope4:.2f} (A=0), {slope6:.2f} (with A); "
            f"(r'/r^3)^3 variant off by {variant_rel:.1e}; "
            f"C_L^-1 variant of A leaves |phi4| = {abs(adj['phi4_with_variant_A']):.1e}"
        )

    return _timed("8 pseudocollision expansion", 15.0, body)


def _wrap(ds, length):
    return np.abs((ds + 0.5 * length) % length - 0.5 * length)


def criterion_9() -> Check:
    def body():
        chart = build_chart(Disc(1.0))
        s, phi = np.meshgrid(np.linspace(0, 2 * np.pi, 50, endpoint=False), np.linspace(0.01, np.pi - 0.01, 50))
        s1, phi1 = billiard.step_arrays(chart, s.ravel(), phi.ravel())
        disc_err = max(
            float(np.max(_wrap(s1 - (s.ravel() + 2 * phi.ravel()), chart.length))),
            float(np.max(np.abs(phi1 - phi.ravel()))),
        )
        ell = build_chart(Ellipse(1, 1.2))
        rng = np.random.default_rng(7)
        s0 = rng.uniform(0, ell.length, 100)
        p0 = rng.uniform(0.05, np.pi - 0.05, 100)
        a, b = billiard.step_arrays(ell, s0, p0)
        a, b = billiard.step_arrays(ell, a, np.pi - b)
        rev = max(float(np.max(_wrap(a - s0, ell.length))), float(np.max(np.abs(np.pi - b - p0))))
        return disc_err < 1e-10 and rev < 1e-9, f"disc closed form {disc_err:.1e}; reversor {rev:.1e}"

    return _timed("9 billiard map oracles", 2.0, body)


def criterion_10() -> Check:
    def body():
        spec = Ellipse(1, 1.2)
        chart = build_chart(spec)
        lc = build_lazutkin(chart)
        table = orbits.alpha_table(chart, lc, (32, 64, 128))
        ratios = [float(table.doubling_ratios(j)[0]) for j in (4, 12)]  # k/q = 1/8, 3/8
        cv = orbits.cross_validate_x1(chart, lc, table)
        worst_res = max(o.residual for o in table.orbits)
        ok = all(3 <= r <= 5 for r in ratios) and cv["max_deviation"] < 1e-2 and worst_res < 1e-10
        return ok, (
            "doubling ratios at k/q = 1/8, 3/8: "
            + ", ".join(f"{r:.3f}" for r in ratios)
            + f"; max deviation of -alpha Y0^2 from X1 {cv['max_deviation']:.1e}"
            + f"; orbit residual {worst_res:.1e}"
        )

    return _timed("10 periodic orbits recover X1", 30.0, body)


def geometry_residuals(spec) -> dict:
    chart = build_chart(spec)
    lc = build_lazutkin(chart)
    edges = np.linspace(0, chart.length, 257)
    gb = float(np.sum(integrate_interval(lambda s: 1.0 / chart.rho_al(s), edges[:-1], edges[1:], 16)))
    closure = abs(chart.z_of_theta(2 * np.pi) - chart.z_of_theta(0.0))
    s = np.linspace(0, chart.length, 97)
    speed = 0.0
    for h in (1e-3, 1e-4):
        chord = np.abs(chart.point(s + h) - chart.point(s))
        mid = chart.rho_al(s + h / 2)
        speed = max(speed, float(np.max(np.abs(chord - h + h**3 / (24 * mid**2)))))
    x = lc.x0(s)
    back = float(np.max(np.abs(lc.x0_inverse(x) - s)))
    monotone = bool(np.all(np.diff(x) > 0))
    return {
        "gauss_bonnet": abs(gb - 2 * np.pi),
        "closure": float(closure),
        "unit_speed": speed,
        "round_trip": back,
        "monotone": monotone,
    }


def criterion_11() -> Check:
    def body():
        worst = {"gauss_bonnet": 0.0, "closure": 0.0, "unit_speed": 0.0, "round_trip": 0.0}
        monotone = True
        for spec in BUILTIN_SPECS.values():
            r = geometry_residuals(spec)
            monotone &= r.pop("monotone")
            for k, v in r.items():
                worst[k] = max(worst[k], v)
        ok = monotone and all(v < 1e-10 for v in worst.values())
        return ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f", X0 monotone {monotone}"

    return _timed("11 geometry invariants", 2.0, body)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_acceptance(only=None, svg_path=None) -> list[Check]:
    out = []
    for number, fn in CRITERIA.items():
        if only and number not in only:
            continue
        out.append(fn(svg_path) if number == 5 else fn())
    return out


# --- checks for one domain --------------------------------------------------


def domain_checks(spec, orbit_ladder=(32, 64, 128)) -> list[Check]:
    chart = build_chart(spec)
    lc = build_lazutkin(chart)
    data = nf.normal_form(lc)
    checks = []

    def geometry():
        r = geometry_residuals(spec)
        ok = r.pop("monotone") and all(v < 1e-10 for v in r.values())
        return ok, ", ".join(f"{k} {v:.1e}" for k, v in r.items())

    checks.append(_timed("geometry invariants", None, geometry))

    def invariants():
        arc = c_bv_arc_length(lc)
        rel = abs(arc / lc.c_bv - 1)
        return lc.c_bv > 0 and rel < 1e-8, f"C_BV = {lc.c_bv:.12g}, arc-length form relative {rel:.1e}"

    checks.append(_timed("C_BV two ways", None, invariants))

    def normalization():
        s = np.linspace(0, chart.length, 257)
        x1a, x1b = data.x1(s), data.x1_via_a(s)
        scale = max(float(np.max(np.abs(x1a))), 1e-300)
        two_paths = float(np.max(np.abs(x1a - x1b)))
        rel = two_paths / scale if scale > 1e-12 else two_paths
        a_end = abs(float(data.a(1.0)))
        x_end = abs(float(data.x1(chart.length)))
        ok = a_end < 1e-9 and x_end < 1e-9 and abs(float(data.x1(0.0))) == 0.0 and rel < 1e-6
        return ok, f"A(1) {a_end:.1e}; X1(l) {x_end:.1e}; X1 vs -A(X0) Y0^2 {rel:.1e}"

    checks.append(_timed("X1 and A normalization", None, normalization))

    def identities():
        xi = (np.arange(64) + 0.5) / 64
        _, a4, b4 = nf.classical_coefficients(lc, xi)
        ident = float(np.max(np.abs(b4 + a4 / 2)))
        res = float(np.max(np.abs(nf.ode_residual(lc, xi))))
        return ident < 1e-12 and res < 1e-8, f"|b4 + a4/2| {ident:.1e}; ODE residual {res:.1e}"

    checks.append(_timed("classical-coefficient identities", None, identities))

    def chords():
        err = chord_errors(lc, (0.1, 0.37, 0.6, 0.85), "auto")
        return err < 1e-6, f"max relative error {err:.1e}"

    checks.append(_timed("chord expansion coefficients", None, chords))

    def expansion():
        worst_closed, worst_a = 0.0, 0.0
        for xi in (0.2, 0.45, 0.7):
            e0 = nf.phi4_numeric(lc, xi)
            scale = max(abs(float(nf.phi4_closed_form(lc, xi))), 1e-3)
            worst_closed = max(worst_closed, abs(e0.phi4 - float(nf.phi4_closed_form(lc, xi))) / scale)
            worst_a = max(worst_a, abs(nf.phi4_numeric(lc, xi, "auto").phi4))
        return worst_closed < 1e-5 and worst_a < 1e-6, (
            f"phi4 vs closed form {worst_closed:.1e}; |phi4| with A {worst_a:.1e}"
        )

    checks.append(_timed("pseudocollision expansion", None, expansion))

    def reversibility():
        rng = np.random.default_rng(11)
        s0 = rng.uniform(0, chart.length, 100)
        p0 = rng.uniform(0.05, np.pi - 0.05, 100)
        a, b = billiard.step_arrays(chart, s0, p0)
        refl = float(np.max(billiard.reflection_residual(chart, s0, p0, a, b)))
        a, b = billiard.step_arrays(chart, a, np.pi - b)
        rev = max(float(np.max(_wrap(a - s0, chart.length))), float(np.max(np.abs(np.pi - b - p0))))
        return rev < 1e-9 and refl < 1e-10, f"reversor {rev:.1e}; reflection residual {refl:.1e}"

    checks.append(_timed("billiard map", None, reversibility))

    if is_axially_symmetric(spec):

        def orbit_oracle():
            table = orbits.alpha_table(chart, lc, orbit_ladder)
            cv = orbits.cross_validate_x1(chart, lc, table)
            limit = 1e-2 if cv["relative"] else 1e-8
            kind = "relative" if cv["relative"] else "absolute"
            return cv["max_deviation"] < limit, f"{kind} deviation of -alpha Y0^2 from X1 {cv['max_deviation']:.1e}"

        checks.append(_timed("periodic-orbit oracle for X1", None, orbit_oracle))

    verdict = nf.disc_test(lc)
    checks.append(Check("disc test (report)", True, f"is_disc = {str(verdict.is_disc).lower()}; {verdict}"))
    return checks


def format_report(checks: list[Check]) -> str:
    lines = [c.line() for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    return "\n".join(lines)
