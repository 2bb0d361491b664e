"""Trace A(xi) for x'' - F(x)' + x = A sin t + sin 2t on (0, pi) with Dirichlet ends.

Writes curve.csv and curve.gp to the output directory and prints the fold
value, the solution counts at a few amplitudes, and how the fold moves with
the number of Galerkin modes.

    python3 scripts/solution_curve.py --out runs/curve
"""

import argparse
import json
from pathlib import Path

from forced_resonance import DirichletProblem, SaturatingNonlinearity, find_fold, solutions_at, sweep_curve
from forced_resonance.bvp import with_modes
from forced_resonance.cli import GNUPLOT, curve_rows, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/curve"))
    ap.add_argument("--nonlinearity", default="sigmoid")
    ap.add_argument("--modes", type=int, nargs="+", default=[16, 32])
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--amplitudes", type=float, nargs="+", default=[-2.5, -0.15, 0.0, 1.0])
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    dp = DirichletProblem(SaturatingNonlinearity.from_kind(args.nonlinearity))
    summary = {"folds": {}}
    for N in args.modes:
        curve = sweep_curve(with_modes(dp, N), -20.0, 20.0, args.step)
        fold = find_fold(curve)
        summary["folds"][N] = {"A0": fold.A0, "xi_at_fold": fold.xi_at_fold}
        if N == args.modes[0]:
            header = ["xi", "A", "residual"] + [f"x{k}" for k in range(2, N + 1)]
            write_csv(args.out / "curve.csv", header, curve_rows(curve))
            (args.out / "curve.gp").write_text(GNUPLOT.format(csv="curve.csv"))
            summary["counts"] = {str(A): solutions_at(curve, A) for A in args.amplitudes}
            summary["tails"] = [float(curve.A[0]), float(curve.A[-1])]
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
