"""Command line front end.

Reports go to stdout as JSON. CSV tables and gnuplot scripts are written to
``--out`` when given. Exit codes: 0 success, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bvp, poincare, resonance
from .config import SCHEMA_HELP, ProblemConfig, dump_config, load_config, with_solver
from .errors import ConfigError, SolverFailure
from .ode_core import TWO_PI

COMMANDS = ("check", "periodic", "return-map", "drift", "curve", "fold", "count", "verify")
PERIODIC_ONLY = {"periodic", "return-map", "drift", "verify"}
DIRICHLET_ONLY = {"curve", "fold", "count"}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def trajectory_rows(sol: poincare.PeriodicSolution, p):
    t = sol.samples.times
    x, y = sol.samples.states[:, 0], sol.samples.states[:, 1]
    return zip(t, x, y - p.nonlinearity.F(x), y)


def curve_rows(curve: bvp.SolutionCurve):
    for q in curve.points:
        yield (q.xi, q.A, q.residual, *q.coeffs)


GNUPLOT = """\
# A(xi) for x'' - F(x)' + x = A sin t + e(t), x(0) = x(pi) = 0
set datafile separator ","
set key autotitle columnhead
set xlabel "xi (first harmonic of x)"
set ylabel "A"
set grid
plot "{csv}" using 1:2 with lines lw 2 title "A(xi)"
"""


# --------------------------------------------------------------------------
# subcommands


def cmd_check(cfg: ProblemConfig, args) -> dict:
    if cfg.mode == "periodic":
        rep = resonance.check_periodic_condition(cfg.oscillator())
    else:
        rep = resonance.check_dirichlet_necessary(
            cfg.dirichlet().nonlinearity, cfg.dirichlet_forcing())
    out = {"lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds, "margin": rep.margin}
    if rep.kernel_integral is not None:
        out["kernel_integral"] = rep.kernel_integral
    return out


def _seeds(cfg: ProblemConfig) -> poincare.SeedGrid:
    s = cfg.solver
    return poincare.SeedGrid(s.seed_radii, s.seed_angles, s.seed_radius)


def _solution_report(sol, p, cfg):
    return {
        "initial_state": {"x": sol.initial_state.x, "y": sol.initial_state.y},
        "residual": sol.residual,
        "first_harmonics": {"cos": sol.first_harmonics[0], "sin": sol.first_harmonics[1]},
        "periodicity_residual": poincare.verify_periodicity(sol, p, cfg.solver.newton_tolerances()),
        "equation_residual": poincare.equation_residual(p, sol.initial_state),
    }


def cmd_periodic(cfg: ProblemConfig, args) -> dict:
    p = cfg.oscillator()
    sol = poincare.find_fixed_point(p, _seeds(cfg), cfg.solver.newton_tolerances())
    if args.out:
        write_csv(args.out / "periodic.csv", ["t", "x", "x'", "y"], trajectory_rows(sol, p))
    return _solution_report(sol, p, cfg)


def cmd_return_map(cfg: ProblemConfig, args) -> dict:
    p = cfg.oscillator()
    r = poincare.return_map(p, args.radius, args.phi, cfg.solver.tolerances())
    return {"r_in": r.r_in, "phi_in": r.phi_in, "r_out": r.r_out, "theta_out": r.theta_out,
            "contraction": r.contraction,
            "limiting_contraction": float(poincare.limiting_contraction(p, args.phi))}


def cmd_drift(cfg: ProblemConfig, args) -> dict:
    s = cfg.solver
    d = poincare.drift_certificate(cfg.oscillator(), s.drift_radius, s.drift_grid,
                                   s.drift_iterations, tol=s.tolerances())
    return {"min_residual": d.min_residual, "argmin": {"c": d.argmin[0], "phi": d.argmin[1]},
            "max_radius": d.max_radius, "growth": list(d.growth)}


def cmd_verify(cfg: ProblemConfig, args) -> dict:
    p = cfg.oscillator()
    tol = cfg.solver.newton_tolerances()
    if args.state is not None:
        sol = poincare.periodic_solution(p, args.state, tol)
    else:
        sol = poincare.find_fixed_point(p, _seeds(cfg), tol)
    out = _solution_report(sol, p, cfg)
    checks = [resonance.identity_integral(p, sol, math.cos(a), math.sin(a))
              for a in TWO_PI * np.arange(16) / 16]
    out["identity_max_defect"] = max(c.defect for c in checks)
    out["identity_max_abs_I"] = max(abs(c.I) for c in checks)
    out["identity_bound"] = checks[0].bound
    out["periodic"] = bool(out["periodicity_residual"] < 10 * tol.fixed_point)
    return out


def _curve(cfg: ProblemConfig) -> bvp.SolutionCurve:
    s = cfg.solver
    return bvp.sweep_curve(cfg.dirichlet(), s.xi_lo, s.xi_hi, s.xi_step)


def cmd_curve(cfg: ProblemConfig, args) -> dict:
    curve = _curve(cfg)
    if args.out:
        header = ["xi", "A", "residual"] + [f"x{k}" for k in range(2, cfg.solver.modes + 1)]
        write_csv(args.out / "curve.csv", header, curve_rows(curve))
        (args.out / "curve.gp").write_text(GNUPLOT.format(csv="curve.csv"))
    A = curve.A
    return {"points": len(curve.points), "xi_range": list(curve.xi_range), "step": curve.step,
            "A_min": float(A.min()), "A_max": float(A.max()),
            "A_at_ends": [float(A[0]), float(A[-1])],
            "max_residual": max(q.residual for q in curve.points)}


def cmd_fold(cfg: ProblemConfig, args) -> dict:
    fr = bvp.find_fold(_curve(cfg))
    return {"A0": fr.A0, "xi_at_fold": fr.xi_at_fold, "flat": fr.flat}


def cmd_count(cfg: ProblemConfig, args) -> dict:
    A = cfg.amplitude if args.amplitude is None else args.amplitude
    curve = _curve(cfg)
    roots = bvp.solutions_at(curve, A)
    fr = bvp.find_fold(curve)
    return {"A": A, "count": len(roots), "roots": roots, "A0": fr.A0,
            # a query equal to the fold value meets the curve tangentially
            "tangential_at_fold": bool(abs(A - fr.A0) < 1e-9)}


HANDLERS = {
    "check": cmd_check, "periodic": cmd_periodic, "return-map": cmd_return_map,
    "drift": cmd_drift, "curve": cmd_curve, "fold": cmd_fold, "count": cmd_count,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# argument parsing


def _pair(text, sep, kind):
    try:
        a, b = text.split(sep)
        return kind(a), kind(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two values separated by {sep!r}, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forced-resonance",
        description="Periodic solutions of x'' + f(x)x' + n^2 x = e(t) at resonance, "
                    "and the solution curve of the Dirichlet problem.",
        epilog=SCHEMA_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, required=True)
    parser.add_argument("--out", type=Path, help="directory for CSV and plot files")
    parser.add_argument("--tol", type=float, help="integrator relative tolerance (abs = tol/100)")
    parser.add_argument("--seed-grid", type=lambda s: _pair(s, "x", int), metavar="RxS",
                        help="Newton seeds: R radii times S angles")
    parser.add_argument("--xi-range", type=lambda s: _pair(s, ":", float), metavar="LO:HI",
                        help="sweep window; write --xi-range=-20:20 when LO is negative")
    parser.add_argument("--xi-step", type=float)
    parser.add_argument("--modes", type=int)
    parser.add_argument("--radius", type=float, default=10.0, help="return-map initial radius c")
    parser.add_argument("--phi", type=float, default=0.0, help="return-map initial angle")
    parser.add_argument("--amplitude", type=float, help="count: forcing amplitude A to query")
    parser.add_argument("--state", type=lambda s: _pair(s, ",", float), metavar="X,Y",
                        help="verify: Lienard initial state instead of searching")
    parser.add_argument("--dump-config", action="store_true",
                        help="print the resolved config and exit")
    return parser


def resolve_config(args) -> ProblemConfig:
    cfg = load_config(args.config)
    overrides = {}
    if args.tol is not None:
        overrides.update(rel_tol=args.tol, abs_tol=args.tol / 100)
    if args.seed_grid is not None:
        overrides.update(seed_radii=args.seed_grid[0], seed_angles=args.seed_grid[1])
    if args.xi_range is not None:
        overrides.update(xi_lo=args.xi_range[0], xi_hi=args.xi_range[1])
    if args.xi_step is not None:
        overrides["xi_step"] = args.xi_step
    if args.modes is not None:
        overrides["modes"] = args.modes
    return with_solver(cfg, **overrides) if overrides else cfg


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            print(dump_config(cfg))
            return 0
        if args.command in PERIODIC_ONLY and cfg.mode != "periodic":
            raise ConfigError(f"{args.command} needs a periodic-mode config")
        if args.command in DIRICHLET_ONLY and cfg.mode != "dirichlet":
            raise ConfigError(f"{args.command} needs a dirichlet-mode config")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
        report = HANDLERS[args.command](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}\n\n{SCHEMA_HELP}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(json.dumps({"command": args.command, "error": type(exc).__name__,
                          "message": str(exc)}, indent=2))
        return 3
    print(json.dumps({"command": args.command, "mode": cfg.mode, **report}, indent=2))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
