"""Command-line entry point: ``birkhoff <subcommand> ...``.

Exit status is 0 on success, 1 when a computation fails or a check does not
pass, and 2 for usage errors (including unreadable or invalid domain files).
``disc-test`` exits 0 exactly when the domain is judged to be a disc.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import billiard, normal_form as nf, orbits, pendulum, verify
from .domain import DomainError, build_chart, load_domain
from .lazutkin import build_lazutkin
from .output import Table, format_csv, format_json, svg_document, write_text

PROG = "birkhoff"


class UsageError(Exception):
    pass


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _energy(text):
    value = float(text)
    if not 0 < value < 0.25:
        raise argparse.ArgumentTypeError(f"energy must lie in (0, 1/4), got {text}")
    return value


def _angle(text):
    value = float(text)
    if not billiard.GRAZING_LIMIT <= value <= np.pi - billiard.GRAZING_LIMIT:
        raise argparse.ArgumentTypeError(f"angle must lie in (1e-8, pi - 1e-8), got {text}")
    return value


def _count(minimum):
    def parse(text):
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"expected an integer >= {minimum}, got {text}")
        return value

    return parse


def _ladder(text):
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if len(values) < 2 or any(v < 3 for v in values):
        raise argparse.ArgumentTypeError("q-ladder needs at least two values, each >= 3")
    return values


def _load(args):
    try:
        spec = load_domain(args.domain)
    except OSError as exc:
        raise UsageError(f"cannot read domain file: {exc}") from None
    except DomainError as exc:
        raise UsageError(f"invalid domain file {args.domain}: {exc}") from None
    chart = build_chart(spec, tol=args.geometry_tol)
    return spec, chart, build_lazutkin(chart)


def _meta(spec, args, **extra):
    meta = {"generator": f"{PROG} {args.command}"}
    if spec is not None:
        meta["domain"] = spec.label()
        meta["domain_sha256"] = spec.digest()
    meta["geometry_tol"] = repr(getattr(args, "geometry_tol", 1e-10))
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


def _emit(table: Table, args):
    """CSV and/or JSON to the requested files; CSV to stdout otherwise."""
    wrote = False
    if getattr(args, "csv", None):
        write_text(args.csv, format_csv(table))
        wrote = True
    if getattr(args, "json", None):
        write_text(args.json, format_json(table))
        wrote = True
    if not wrote:
        sys.stdout.write(format_csv(table))


def cmd_lazutkin_table(args):
    spec, chart, lc = _load(args)
    s = np.linspace(0.0, chart.length, args.n, endpoint=False)
    x = lc.x0(s)
    table = Table.from_columns(
        {"s": s, "X0": x, "rho_al": chart.rho_al(s), "rho_L": lc.rho_l(x), "Y0": lc.y0(s)},
        _meta(spec, args, C_L=repr(float(lc.c_l)), C_BV=repr(float(lc.c_bv))),
    )
    _emit(table, args)
    return 0


def cmd_x1(args):
    spec, chart, lc = _load(args)
    s = np.linspace(0.0, chart.length, args.n, endpoint=False)
    table = Table.from_columns({"s": s, "X1": nf.x1(lc, s)}, _meta(spec, args, C_BV=repr(float(lc.c_bv))))
    _emit(table, args)
    return 0


def cmd_disc_test(args):
    _, _, lc = _load(args)
    verdict = nf.disc_test(lc, tol=args.disc_tol)
    print(verdict)
    return 0 if verdict.is_disc else 1


def cmd_orbit(args):
    spec, chart, _ = _load(args)
    state = billiard.PhaseState(args.s % chart.length, args.phi)
    states = [state] + billiard.orbit(chart, state, args.n)
    s = np.array([st.s for st in states])
    phi = np.array([st.phi for st in states])
    table = Table.from_columns({"k": np.arange(len(states)), "s": s, "phi": phi}, _meta(spec, args))
    _emit(table, args)
    if args.svg:
        theta = np.linspace(0.0, 2 * np.pi, 721)
        boundary = chart.z_of_theta(theta)
        chords = chart.point(s)
        write_text(
            args.svg,
            svg_document(
                [(boundary, {"stroke": "black"}), (chords, {"stroke": "#d62728", "stroke-width": 1})],
                [(chords[0], "start", "#1f77b4")],
                f"{spec.label()}: {args.n} bounces from s={args.s:g}, phi={args.phi:g}",
            ),
        )
    return 0


def cmd_orbit_alpha(args):
    spec, chart, lc = _load(args)
    table = orbits.alpha_table(chart, lc, args.q_ladder, anchor=args.anchor)
    s = lc.x0_inverse(table.orbits[0].x[0] + table.frac)
    target = -nf.x1(lc, s) / lc.y0(s) ** 2
    cols = {"k/q": table.frac}
    for q, row in zip(table.ladder, table.alpha_hat):
        cols[f"alpha_hat(q={q})"] = row
    cols["alpha_extrapolated"] = table.extrapolated
    cols["-X1/Y0^2"] = target
    _emit(Table.from_columns(cols, _meta(spec, args, q_ladder=",".join(map(str, table.ladder)))), args)
    return 0


def cmd_pendulum(args):
    E = args.energy
    lev = pendulum.level(E, args.c_star)
    traj = pendulum.integrate(E, samples=args.samples)
    table = Table.from_columns(
        {"tau": traj.tau, "zeta": traj.zeta, "zeta_tau": traj.zeta_tau, "H": traj.H},
        _meta(None, args, E=repr(E), T=repr(float(lev.T)), Theta=repr(float(lev.Theta))),
    )
    print(f"E = {E:g}: zeta- = {lev.zeta_minus:.12g}, zeta+ = {lev.zeta_plus:.12g}, T = {lev.T:.12g}")
    print(f"Theta(E) = {lev.Theta:.15g} (4 pi = {4 * np.pi:.15g})")
    if args.csv or args.json:
        _emit(table, args)
    if args.gamma or args.svg:
        curve = pendulum.gamma_curve(E, args.c_star)
        print(
            f"Gamma: turning angle {curve.turning_angle:.12g} = 4 pi {curve.turning_angle - 4 * np.pi:+.1e}; "
            f"endpoint gap {curve.endpoint_gap:.6g}; polyline self-intersections {curve.self_intersections()}"
        )
        if args.svg:
            write_text(args.svg, verify.gamma_svg([curve]))
    return 0


def cmd_expansion_check(args):
    _, _, lc = _load(args)
    correction = None if args.correction == "zero" else "auto"
    closed = nf.chord_coefficients(lc, args.xi, correction)
    oracle = nf.chord_expansion_oracle(lc, args.xi, correction)
    print(f"{'coefficient':<12}{'closed form':>24}{'oracle':>24}{'relative error':>16}")
    worst = 0.0
    for key in nf.CHORD_KEYS:
        c, o = float(closed[key]), oracle[key]
        err = abs(c - o) / max(abs(c), 1.0)
        worst = max(worst, err)
        name = ("St" if key[0] == "S" else "Ct") + key[1:]
        print(f"{name:<12}{c:>24.15g}{o:>24.15g}{err:>16.2e}")
    ok = worst < args.limit
    print(f"max relative error {worst:.2e} ({'within' if ok else 'above'} {args.limit:g})")
    return 0 if ok else 1


def cmd_verify_all(args):
    if args.domain:
        spec, _, _ = _load(args)
        print(f"verification for {spec.label()}")
        checks = verify.domain_checks(spec, args.q_ladder)
    else:
        checks = verify.run_acceptance(svg_path=args.svg)
    print(verify.format_report(checks))
    return 0 if all(c.passed for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Normal-form data of convex billiards.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name, func, help_text, domain=True, domain_required=True):
        p = sub.add_parser(name, help=help_text, description=help_text)
        if domain:
            p.add_argument("--domain", required=domain_required, help="domain description file")
            p.add_argument("--geometry-tol", type=_positive_float, default=1e-10, help="quadrature tolerance of the boundary chart")
        p.set_defaults(func=func)
        return p

    def outputs(p):
        p.add_argument("--csv", type=Path, help="write the table as CSV")
        p.add_argument("--json", type=Path, help="write the table as JSON")

    p = add("lazutkin-table", cmd_lazutkin_table, "tabulate X0, rho and Y0 on an arc-length grid")
    p.add_argument("--n", type=_count(2), default=256, help="grid size")
    outputs(p)

    p = add("x1", cmd_x1, "tabulate X1 on an arc-length grid")
    p.add_argument("--n", type=_count(2), default=2048, help="grid size")
    outputs(p)

    p = add("disc-test", cmd_disc_test, "decide whether the domain is a disc (exit 0 iff disc)")
    p.add_argument("--tol", dest="disc_tol", type=_positive_float, default=1e-8,
                   help="threshold on sup|X1|")

    p = add("orbit", cmd_orbit, "iterate the billiard map")
    p.add_argument("--s", type=float, required=True, help="starting arc length")
    p.add_argument("--phi", type=_angle, required=True, help="starting angle in (0, pi)")
    p.add_argument("--n", type=_count(0), default=10, help="number of bounces")
    p.add_argument("--svg", type=Path, help="draw the chords inside the boundary")
    outputs(p)

    p = add("orbit-alpha", cmd_orbit_alpha, "alpha from 1/q periodic orbits, compared with -X1/Y0^2")
    p.add_argument("--q-ladder", type=_ladder, default=(32, 64, 128), help="doubling list, e.g. 32,64,128")
    p.add_argument("--anchor", type=float, default=0.0, help="arc length of the pinned vertex")
    outputs(p)

    p = add("pendulum", cmd_pendulum, "period, angle integral and Gamma curve of one energy level", domain=False)
    p.add_argument("--energy", type=_energy, required=True, help="energy in (0, 1/4)")
    p.add_argument("--c-star", type=_positive_float, default=1.0, help="scale constant C*")
    p.add_argument("--samples", type=_count(2), default=1001, help="trajectory samples")
    p.add_argument("--gamma", action="store_true", help="also reconstruct the Gamma curve")
    p.add_argument("--svg", type=Path, help="write the Gamma curve as SVG")
    outputs(p)

    p = add("expansion-check", cmd_expansion_check, "chord expansion coefficients: closed forms vs oracle")
    p.add_argument("--xi", type=float, required=True, help="Lazutkin coordinate")
    p.add_argument("--correction", choices=("zero", "auto"), default="zero",
                   help="angular correction A: zero, or the one computed for the domain")
    p.add_argument("--limit", type=_positive_float, default=1e-6, help="relative error limit")

    p = add("verify-all", cmd_verify_all, "run the acceptance suite, or the checks for one domain",
            domain_required=False)
    p.add_argument("--q-ladder", type=_ladder, default=(32, 64, 128), help="orbit ladder for --domain")
    p.add_argument("--svg", type=Path, help="where to write the Gamma-curve figure")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"{PROG}: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
