"""Command-line entry point.

Exit codes: 0 success, 1 a check failed, 2 non-convergence, 3 invalid
input, 64 usage error.
"""

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

from . import checks
from .crapper import WaveParams, crapper_interface
from .errors import (CrapperError, InnerNotConverged, NoBracket, NoConvergence, SingularJacobian,
                     VersionError)
from .geometry import detect_overhang, detect_self_intersection
from .io import export_solution, read_record, write_csv
from .plotting import emit_plot
from .residuals import residual
from .solver import continuation_sweep, crapper_state, linear_path

EXIT_OK, EXIT_CHECK, EXIT_NOCONV, EXIT_INPUT, EXIT_USAGE = 0, 1, 2, 3, 64
NONCONVERGENCE = (NoConvergence, NoBracket, InnerNotConverged, SingularJacobian)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def load_defaults(path=None):
    if path is None:
        text = resources.files("crapperwaves").joinpath("defaults.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _common(sub, defaults, state_out=True):
    sub.add_argument("--A", type=float, default=defaults["A"])
    sub.add_argument("--N", type=int, default=defaults["N"])
    if state_out:
        sub.add_argument("--out", type=Path, required=True, help="state file (.json); a .csv companion is written")
        sub.add_argument("--plot", type=Path, help="also draw the profile as SVG")


def _solver_flags(sub, defaults):
    sub.add_argument("--p", type=float, default=0.0)
    sub.add_argument("--omega0", type=float, default=0.0)
    sub.add_argument("--steps", type=int, default=None, help="path steps (default: from --max-step)")
    sub.add_argument("--max-step", type=float, default=defaults["max_step"])
    sub.add_argument("--tol", type=float, default=defaults["inner_tol"])
    sub.add_argument("--outer-tol", type=float, default=defaults["outer_tol"])
    sub.add_argument("--param-cap", type=float, default=defaults["param_cap"])
    sub.add_argument("--B-cap", type=float, default=defaults["B_cap"])
    sub.add_argument("--psi-min", type=float, default=defaults["psi_min"])
    sub.add_argument("--anchor", choices=("vortex", "crest"), default=defaults["anchor"])
    sub.add_argument("--planar-vortex", action="store_true", help="no periodic images of the vorticity")


def build_parser(defaults):
    parser = _Parser(prog="crapperwaves", description="Perturbed Crapper waves with a point vortex or patch.")
    parser.add_argument("--defaults", type=Path, help="JSON file overriding the built-in defaults")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = subs.add_parser("exact", help="Crapper profile for A")
    _common(sp, defaults)

    sp = subs.add_parser("solve-point", help="continuation with a point vortex")
    _common(sp, defaults)
    _solver_flags(sp, defaults)
    sp.add_argument("--rho0", type=float, default=defaults["rho0"])

    sp = subs.add_parser("solve-patch", help="continuation with a vortex patch")
    _common(sp, defaults)
    _solver_flags(sp, defaults)
    sp.add_argument("--radius", type=float, default=defaults["radius"])
    sp.add_argument("--psi-p", type=float, default=defaults["psi_p"])
    sp.add_argument("--fixed-radius", action="store_true", help="keep r fixed and report F3")

    sp = subs.add_parser("check", help="invariant suite, or revalidate a stored state")
    _common(sp, defaults, state_out=False)
    sp.add_argument("--from", dest="source", type=Path)
    sp.add_argument("--no-slope", action="store_true", help="skip the outer-slope probe")

    sp = subs.add_parser("plot", help="SVG drawing of a stored state or a Crapper wave")
    _common(sp, defaults, state_out=False)
    sp.add_argument("--from", dest="source", type=Path)
    sp.add_argument("--out", type=Path, required=True)

    sp = subs.add_parser("export", help="CSV profile table of a stored state")
    sp.add_argument("--from", dest="source", type=Path, required=True)
    sp.add_argument("--out", type=Path, required=True)
    return parser


def _vorticity_marks(state, params, curve):
    """Vortex position or patch boundary for the drawing."""
    if params.mode == "point" and params.omega0 != 0.0:
        from .residuals import vortex_depth

        W0 = residual(state, params).corrections.W0
        depth = vortex_depth(state.theta_A, params.psi0, W0)
        z0 = curve.z[curve.N // 2]
        return complex(z0.real, z0.imag - depth), None
    if params.mode == "patch":
        return None, residual(state, params).extras.get("patch")
    return None, None


def _report(state, params, res, extra=None):
    over, measure = detect_overhang(res.curve)
    out = {
        "residual": res.norm(),
        "solvability": res.solvability,
        "overhang": over,
        "overhang_measure": measure,
        "self_intersection": detect_self_intersection(res.curve),
    }
    out.update(extra or {})
    return out


def _write_outputs(args, state, params, res, diagnostics, tol, outer_tol):
    residuals = {"norm": res.norm(), "solvability": res.solvability,
                 "tolerance": 10.0 * tol, "solvability_tolerance": 10.0 * outer_tol}
    if res.F3 is not None:
        residuals["F3_sup"] = float(max(abs(res.F3)))
    json_path, csv_path = export_solution(state, params, args.out, residuals, diagnostics)
    print(f"wrote {json_path} and {csv_path}")
    if args.plot:
        vortex, patch = _vorticity_marks(state, params, res.curve)
        emit_plot(res.curve, args.plot, patch=patch, vortex=vortex)
        print(f"wrote {args.plot}")


def cmd_exact(args, defaults):
    params = WaveParams(A=args.A)
    state = crapper_state(args.A, args.N)
    res = residual(state, params)
    diag = _report(state, params, res)
    _write_outputs(args, state, params, res, diag, defaults["inner_tol"], defaults["outer_tol"])
    print(f"A = {args.A}  overhang = {diag['overhang']}  self-intersection = {diag['self_intersection']}")
    return EXIT_OK


def _solve(args, params):
    target = (args.p, args.omega0)
    span = max(abs(target[0]), abs(target[1]))
    steps = args.steps or max(1, math.ceil(span / args.max_step - 1e-12))
    path = linear_path(target, steps)
    run = continuation_sweep(args.A, path, mode=params.mode, N=args.N, base_params=params, tol=args.tol,
                             max_step=args.max_step, outer_tol=args.outer_tol,
                             param_cap=args.param_cap, B_cap=args.B_cap)
    for (p, w0), B, d in zip(run.params_path, run.B_star, run.diagnostics):
        print(f"p = {p:.3e}  omega0 = {w0:.3e}  B* = {B:+.6e}  residual = {d['residual']:.2e}  "
              f"overhang = {d['overhang']}")
    if run.failure:
        print(f"continuation stopped: {run.failure}", file=sys.stderr)
        return run, EXIT_NOCONV
    state = run.final
    final = params.with_(p=target[0], omega0=target[1], B=run.B_star[-1])
    res = residual(state, final)
    diag = dict(run.diagnostics[-1])
    diag["path"] = [list(pt) for pt in run.params_path]
    diag["B_star"] = list(run.B_star)
    _write_outputs(args, state, final, res, diag, args.tol, args.outer_tol)
    return run, EXIT_OK


def cmd_solve_point(args, defaults):
    params = WaveParams(A=args.A, mode="point", vortex_rho0=args.rho0, anchor=args.anchor,
                        periodic_vortex=not args.planar_vortex, psi_min=args.psi_min)
    return _solve(args, params)[1]


def cmd_solve_patch(args, defaults):
    params = WaveParams(A=args.A, mode="patch", patch_radius=args.radius, patch_center_psi=args.psi_p,
                        anchor=args.anchor, periodic_vortex=not args.planar_vortex,
                        psi_min=args.psi_min, fixed_radius=args.fixed_radius)
    return _solve(args, params)[1]


def cmd_check(args, defaults):
    if args.source:
        results = checks.revalidate(read_record(args.source))
    else:
        results = checks.run_suite(args.A, args.N, slope=not args.no_slope)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def cmd_plot(args, defaults):
    if args.source:
        rec = read_record(args.source)
        state, params = rec.to_state(), rec.to_params()
        res = residual(state, params)
        vortex, patch = _vorticity_marks(state, params, res.curve)
        emit_plot(res.curve, args.out, patch=patch, vortex=vortex)
    else:
        emit_plot(crapper_interface(args.A, args.N), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_export(args, defaults):
    rec = read_record(args.source)
    write_csv(rec.to_state(), rec.to_params(), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


COMMANDS = {
    "exact": cmd_exact,
    "solve-point": cmd_solve_point,
    "solve-patch": cmd_solve_patch,
    "check": cmd_check,
    "plot": cmd_plot,
    "export": cmd_export,
}


def run_command(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre = _Parser(add_help=False)
        pre.add_argument("--defaults", type=Path)
        known, _ = pre.parse_known_args(argv)
        defaults = load_defaults(known.defaults)
        args = build_parser(defaults).parse_args(argv)
        if args.command is None:
            raise UsageError("crapperwaves: a subcommand is required")
        return COMMANDS[args.command](args, defaults)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NONCONVERGENCE as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (CrapperError, VersionError, ValueError, OSError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run_command())
