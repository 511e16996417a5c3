"""Command-line interface: ``heisgb {curve,surface,gauss-bonnet,verify,limit-scan}``.

Exit codes: 0 success, 2 input error, 3 numeric-contract violation,
4 property or check failure.  Errors are reported as structured records in
the chosen output format, with a one-line summary on stderr.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__
from . import expr as ex
from .connections import ConnectionKind
from .curves import ParamCurve, curve_curvature_L, curve_curvature_limit, horizontal_discriminator
from .errors import CharacteristicPointError, HeisError, IntegrationError, NumericContractError
from .gauss_bonnet import chart_eval, gb_check_finite_L, gb_residual_limit, orientation_autodetect
from .limits import QUANTITIES, limit_scan, log_grid
from .report import Report, render
from .scenefile import ORIENTATIONS, SHIPPED, load_scene
from .surface_curves import OnSurfaceCurve, geodesic_curvature_L_pair, geodesic_curvature_limit
from .surfaces import gauss_curvature_L, gauss_curvature_limit, mean_curvature_limit
from .verify import run_properties

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_FAILURE = 4


class CommandError(HeisError, ValueError):
    """Inconsistent command-line options."""


# ---------------------------------------------------------------- parsing helpers


def _constant(text: str) -> float:
    try:
        return float(ex.evaluate(ex.parse(text.strip(), ()), {}))
    except ex.ExprError as err:
        raise CommandError(f"{text!r} is not a constant: {err}") from err


def parse_t_grid(text: str) -> np.ndarray:
    """``a:b:n`` (n evenly spaced values, both ends included) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CommandError(f"grid {text!r}: expected a:b:n")
        a, b = _constant(parts[0]), _constant(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise CommandError(f"grid {text!r}: n must be an integer") from None
        if n < 1:
            raise CommandError(f"grid {text!r}: n must be positive")
        return np.linspace(a, b, n)
    return np.array([_constant(p) for p in text.split(",")])


def parse_point(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise CommandError(f"point {text!r}: expected x1,x2,x3")
    return np.array([_constant(p) for p in parts])


def _positive(text: str) -> float:
    value = _constant(text)
    if not value > 0:
        raise CommandError(f"{text!r} must be positive")
    return value


def _scene(args):
    return load_scene(args.scene)


def _surface_u(args):
    if getattr(args, "u", None):
        return ex.parse(args.u, ex.FIELD_VARS)
    if getattr(args, "scene", None):
        return _scene(args).scene.u
    return None


def _curve(args) -> ParamCurve:
    if args.gamma:
        return ParamCurve.from_strings(args.gamma)
    if args.scene:
        curves = _scene(args).scene.boundary
        if not 1 <= args.boundary <= len(curves):
            raise CommandError(f"--boundary {args.boundary}: scene has {len(curves)} boundary curve(s)")
        return curves[args.boundary - 1]
    raise CommandError("give a curve with --gamma or --scene/--boundary")


def _mode(args) -> float | None:
    """The metric parameter, or None for the limit."""
    if args.limit == (args.L is not None):
        raise CommandError("give exactly one of --L and --limit")
    return None if args.limit else args.L


def _capture(record: list):
    """Context manager collecting warnings into ``record`` as strings."""
    class _Ctx:
        def __enter__(self):
            self._cm = warnings.catch_warnings(record=True)
            self._log = self._cm.__enter__()
            warnings.simplefilter("always")
            return self

        def __exit__(self, *exc):
            self._cm.__exit__(*exc)
            record.extend(str(w.message) for w in self._log)
            return False
    return _Ctx()


# ---------------------------------------------------------------- commands


def cmd_curve(args) -> Report:
    kind = ConnectionKind.parse(args.kind)
    L = _mode(args)
    curve = _curve(args)
    t = parse_t_grid(args.t)
    u = _surface_u(args) if args.geodesic else None
    if args.geodesic and u is None:
        raise CommandError("--geodesic needs a surface: --u or --scene")
    params = {"kind": kind.value, "gamma": curve.source(), "t": args.t,
              "L": L, "limit": L is None, "geodesic": bool(args.geodesic)}
    rep = Report("curve", params)
    cj = curve.jet(t)
    cj.require_regular()
    disc = horizontal_discriminator(kind, cj)
    rows = []
    with _capture(rep.warnings):
        if args.geodesic:
            onc = OnSurfaceCurve(curve, u)
            params["u"] = ex.to_source(u)
            rep.columns = ["t", "omega", "omega_dot", "branch", "signed", "unsigned"]
            if L is None:
                for i, ti in enumerate(t):
                    s = geodesic_curvature_limit(kind, onc, float(ti), True)
                    us = geodesic_curvature_limit(kind, onc, float(ti), False)
                    rows.append({"branch": s.branch.value, "signed": s.value, "unsigned": us.value})
            else:
                signed, unsigned = geodesic_curvature_L_pair(kind, L, onc, t)
                rows = [{"branch": None, "signed": a, "unsigned": b} for a, b in zip(signed, unsigned)]
        else:
            rep.columns = ["t", "omega", "omega_dot", "discriminator", "branch", "value"]
            if L is None:
                for ti in t:
                    r = curve_curvature_limit(kind, curve, float(ti))
                    rows.append({"branch": r.branch.value, "value": r.value, "marginal": r.marginal})
                rep.columns.append("marginal")
            else:
                rows = [{"branch": None, "value": k} for k in curve_curvature_L(kind, L, curve, t)]
    for i, row in enumerate(rows):
        row.update(t=t[i], omega=cj.omega[i], omega_dot=cj.omega_dot[i], discriminator=disc[i])
    rep.rows = rows
    if L is None and any(r["branch"] == "HorizontalDivergent" for r in rows):
        rep.summary["divergent_value"] = "coefficient of sqrt(L)"
    return rep


def _surface_points(args, rep: Report):
    if args.point:
        return [parse_point(p) for p in args.point], True
    if not args.scene:
        raise CommandError("give --point or a --scene with --grid")
    scene = _scene(args).scene
    a, b, c, d = scene.domain.bbox()
    n = args.grid
    s1, s2 = np.meshgrid(np.linspace(a, b, n + 2)[1:-1], np.linspace(c, d, n + 2)[1:-1], indexing="ij")
    s = np.stack([s1.ravel(), s2.ravel()], axis=-1)
    s = s[scene.domain.contains(s)]
    x, _, _ = chart_eval(scene, s)
    rep.parameters["grid"] = n
    return list(x), False


def cmd_surface(args) -> Report:
    kind = ConnectionKind.parse(args.kind)
    L = _mode(args)
    u = _surface_u(args)
    if u is None:
        raise CommandError("give a surface with --u or --scene")
    rep = Report("surface", {"kind": kind.value, "u": ex.to_source(u), "L": L, "limit": L is None})
    points, explicit = _surface_points(args, rep)
    if L is None:
        rep.columns = ["x1", "x2", "x3", "H_limit", "K_limit"]
    else:
        rep.columns = ["x1", "x2", "x3", "II11", "II12", "II21", "II22", "H", "K_amb", "K_surf"]
    skipped = 0
    for x in points:
        row = {"x1": x[0], "x2": x[1], "x3": x[2]}
        try:
            if L is None:
                row["H_limit"] = mean_curvature_limit(kind, u, x)
                row["K_limit"] = gauss_curvature_limit(kind, u, x)
            else:
                r = gauss_curvature_L(kind, L, u, x)
                row.update(II11=r.II[0, 0], II12=r.II[0, 1], II21=r.II[1, 0], II22=r.II[1, 1],
                           H=r.H_L, K_amb=r.K_amb, K_surf=r.K_surf)
        except CharacteristicPointError as err:
            if explicit:
                raise
            row["note"] = str(err)
            skipped += 1
        rep.rows.append(row)
    if skipped:
        rep.columns.append("note")
        rep.warnings.append(f"{skipped} grid point(s) are characteristic and carry no values")
    return rep


def _gb_row(r) -> dict:
    return {
        "kind": r.kind, "mode": r.mode, "L": r.L, "orientation": r.orientation,
        "interior": r.interior, "interior_error": r.interior_error,
        "boundary": float(np.sum(r.boundary)), "boundary_error": float(np.sum(r.boundary_errors)),
        "target": r.target, "residual": r.residual, "residual_error": r.residual_error,
        "excised_area_fraction": r.excised_area_fraction,
    }


def cmd_gauss_bonnet(args) -> Report:
    kind = ConnectionKind.parse(args.kind)
    sf = load_scene(args.scene)
    scene, opts = sf.scene, sf.options
    abs_tol = args.abs_tol if args.abs_tol is not None else opts.abs_tol
    rel_tol = args.rel_tol if args.rel_tol is not None else opts.rel_tol
    orientation = ORIENTATIONS[args.orientation] if args.orientation else opts.orientation
    tol = dict(abs_tol=abs_tol, rel_tol=rel_tol)
    params = {"kind": kind.value, "scene": scene.name, "mode": args.mode,
              "abs_tol": abs_tol, "rel_tol": rel_tol}
    rep = Report("gauss-bonnet", params)
    rep.columns = ["kind", "mode", "L", "orientation", "interior", "interior_error", "boundary",
                   "boundary_error", "target", "residual", "residual_error", "excised_area_fraction"]
    if args.mode == "limit":
        if args.L:
            raise CommandError("--L applies to --mode finite-L only")
        rho = args.rho_excise if args.rho_excise is not None else opts.rho_excise
        params["rho_excise"] = rho
        reports = [gb_residual_limit(kind, scene, rho, orientation=orientation, **tol)]
    else:
        grid = tuple(args.L) if args.L else opts.L_grid
        params["L_grid"] = list(grid)
        if orientation is None:
            orientation = orientation_autodetect(scene, **tol)
        reports = [gb_check_finite_L(kind, L, scene, orientation=orientation, **tol) for L in grid]
    rep.rows = [_gb_row(r) for r in reports]
    last = reports[-1]
    rep.summary = {
        "max_abs_residual": max(abs(r.residual) for r in reports),
        "euler_characteristic": scene.euler_characteristic,
        "characteristic_points": last.characteristic_points,
        "boundary_components": [r.boundary for r in reports],
        "boundary_component_errors": [r.boundary_errors for r in reports],
        "node_counts": [r.node_counts for r in reports],
    }
    if args.mode == "limit":
        rep.summary["extrapolation"] = last.extrapolation
    if args.check is not None:
        params["check"] = args.check
        failed = [r for r in reports if abs(r.residual) > args.check]
        if failed:
            rep.status = "fail"
            rep.warnings.append(f"|residual| exceeds {args.check!r} for {len(failed)} row(s)")
    return rep


def cmd_verify(args) -> Report:
    rep = Report("verify", {"seed": args.seed, "samples": args.samples, "only": list(args.only or [])})
    rep.columns = ["property", "passed", "worst", "tolerance", "samples", "detail"]
    results = run_properties(args.seed, args.samples, only=tuple(args.only or ()))
    if not results:
        raise CommandError(f"--only {args.only} selects no property")
    rep.rows = [{"property": r.name, "passed": r.passed, "worst": r.worst, "tolerance": r.tolerance,
                 "samples": r.samples, "detail": r.detail} for r in results]
    failed = [r.name for r in results if not r.passed]
    rep.summary = {"properties": len(results), "passed": len(results) - len(failed), "failed": failed}
    if failed:
        rep.status = "fail"
    return rep


def cmd_limit_scan(args) -> Report:
    kind = ConnectionKind.parse(args.kind)
    grid = log_grid(args.L_min, args.L_max, args.count)
    u = _surface_u(args)
    kw = {}
    if args.quantity in ("curve-curvature", "geodesic-curvature"):
        if args.t is None:
            raise CommandError(f"{args.quantity} needs --t")
        kw.update(curve=_curve(args), t=_constant(args.t))
        if args.quantity == "geodesic-curvature":
            kw["u"] = u
    else:
        if args.point is None or u is None:
            raise CommandError(f"{args.quantity} needs --point and a surface (--u or --scene)")
        kw.update(u=u, point=parse_point(args.point))
    params = {"quantity": args.quantity, "kind": kind.value, "L_min": args.L_min, "L_max": args.L_max,
              "count": args.count}
    if "curve" in kw:
        params.update(gamma=kw["curve"].source(), t=kw["t"])
    if kw.get("u") is not None:
        params["u"] = ex.to_source(kw["u"])
    if "point" in kw:
        params["point"] = kw["point"].tolist()
    rep = Report("limit-scan", params)
    with _capture(rep.warnings):
        r = limit_scan(args.quantity, kind, grid, **kw)
    rep.columns = ["L", "value", "remainder"]
    rep.rows = [{"L": a, "value": b, "remainder": c} for a, b, c in zip(r.L, r.values, r.remainders)]
    rep.summary = {"limit": r.limit, "exponent": r.exponent, "fit_points": r.fit_points,
                   "branch": r.branch, "scaled_by_sqrt_L": r.scaled}
    rep.warnings.extend(r.warnings)
    return rep


COMMANDS = {
    "curve": cmd_curve,
    "surface": cmd_surface,
    "gauss-bonnet": cmd_gauss_bonnet,
    "verify": cmd_verify,
    "limit-scan": cmd_limit_scan,
}


# ---------------------------------------------------------------- argument parser


def build_parser() -> argparse.ArgumentParser:
    kinds = [k.value for k in ConnectionKind]
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "table", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="heisgb", description="Curvature and Gauss-Bonnet checks "
                                     "for connections on the Heisenberg group.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_mode(p):
        p.add_argument("--L", type=_positive, help="metric parameter of g_L")
        p.add_argument("--limit", action="store_true", help="evaluate the L -> infinity limit")

    def add_curve_source(p):
        p.add_argument("--gamma", help='three comma-separated expressions in t, e.g. "cos(t),sin(t),0"')
        p.add_argument("--scene", help=f"scene file or shipped scene ({', '.join(SHIPPED)})")
        p.add_argument("--boundary", type=int, default=1, help="boundary curve of --scene (1-based)")
        p.add_argument("--u", help="defining function of the surface, in x1, x2, x3")

    p = sub.add_parser("curve", parents=[fmt], help="curve curvature or geodesic curvature along t")
    p.add_argument("--kind", required=True, choices=kinds)
    add_curve_source(p)
    add_mode(p)
    p.add_argument("--t", required=True, help="parameter grid a:b:n or comma list")
    p.add_argument("--geodesic", action="store_true", help="signed geodesic curvature on the surface")

    p = sub.add_parser("surface", parents=[fmt], help="second fundamental form, mean and Gauss curvature")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--scene", help=f"scene file or shipped scene ({', '.join(SHIPPED)})")
    p.add_argument("--u", help="defining function, in x1, x2, x3 (overrides the scene)")
    add_mode(p)
    p.add_argument("--point", action="append", help="x1,x2,x3 on the surface (repeatable)")
    p.add_argument("--grid", type=int, default=8, help="n x n chart grid when no --point is given")

    p = sub.add_parser("gauss-bonnet", parents=[fmt], help="Gauss-Bonnet residual of a scene")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--scene", required=True, help=f"scene file or shipped scene ({', '.join(SHIPPED)})")
    p.add_argument("--mode", choices=("limit", "finite-L"), default="limit")
    p.add_argument("--L", type=_positive, action="append", help="metric parameter (repeatable)")
    p.add_argument("--orientation", choices=sorted(ORIENTATIONS), help="overrides the scene option")
    p.add_argument("--rho-excise", type=_positive, help="largest excision radius")
    p.add_argument("--abs-tol", type=_positive)
    p.add_argument("--rel-tol", type=_positive)
    p.add_argument("--check", type=_positive, help="exit 4 when any |residual| exceeds this")

    p = sub.add_parser("verify", parents=[fmt], help="randomised two-path property suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--only", action="append", help="run properties whose name starts with this")

    p = sub.add_parser("limit-scan", parents=[fmt], help="sweep L and fit the remainder exponent")
    p.add_argument("--quantity", required=True, choices=QUANTITIES)
    p.add_argument("--kind", required=True, choices=kinds)
    add_curve_source(p)
    p.add_argument("--t", help="curve parameter")
    p.add_argument("--point", help="x1,x2,x3 on the surface")
    p.add_argument("--L-min", dest="L_min", type=_positive, default=10.0)
    p.add_argument("--L-max", dest="L_max", type=_positive, default=1e7)
    p.add_argument("--count", type=int, default=13)
    return parser


def _exit_code(err: Exception) -> int:
    if isinstance(err, (NumericContractError, IntegrationError)):
        return EXIT_NUMERIC
    return EXIT_INPUT


def _error_record(err: Exception) -> dict:
    details = {k: v for k, v in vars(err).items() if isinstance(v, (int, float, str, list, tuple))}
    return {"type": type(err).__name__, "message": str(err), "exit_code": _exit_code(err), "details": details}


def run(argv=None) -> tuple[Report, int]:
    """Parse ``argv`` and run the command; returns the report and the exit code."""
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "format")}
    try:
        with np.errstate(all="ignore"):
            report = COMMANDS[args.command](args)
    except (HeisError, ex.ExprError, ValueError) as err:
        record = _error_record(err)
        return Report(args.command, params, status="error", error=record), record["exit_code"]
    return report, EXIT_FAILURE if report.status == "fail" else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report, code = run(argv)
    sys.stdout.write(render(report, args.format))
    if report.error:
        print(f"heisgb {report.command}: {report.error['type']}: {report.error['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
