"""Scan the forcing amplitude c in e(t) = c cos nt across the existence threshold 4n/pi.

For each c, report the condition margin, whether a periodic solution was
found (and its residual), and the drift-certificate minimum. Output is a CSV
on stdout.

    python3 scripts/threshold_scan.py --n 1 --points 13
"""

import argparse
import math
import sys

import numpy as np

from forced_resonance import (
    ForcingTerm,
    NoFixedPoint,
    OscillatorProblem,
    SaturatingNonlinearity,
    SeedGrid,
    check_periodic_condition,
    drift_certificate,
    find_fixed_point,
)


def scan(n, kind, cs, drift_grid):
    F = SaturatingNonlinearity.from_kind(kind)
    for c in cs:
        p = OscillatorProblem(n, F, ForcingTerm.from_modes(cos={n: c}))
        rep = check_periodic_condition(p)
        try:
            residual = find_fixed_point(p, SeedGrid(radius=None)).residual
        except NoFixedPoint:
            residual = math.nan
        d = drift_certificate(p, grid=drift_grid, iterations=5)
        yield c, rep.margin, residual, d.min_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--nonlinearity", default="sigmoid")
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--span", type=float, default=0.5, help="scan c/threshold in 1 +- span")
    ap.add_argument("--drift-grid", type=int, default=16)
    args = ap.parse_args()

    c_star = 2 * args.n * SaturatingNonlinearity.from_kind(args.nonlinearity).span / math.pi
    cs = c_star * np.linspace(1 - args.span, 1 + args.span, args.points)
    print("c,c_over_threshold,margin,fixed_point_residual,drift_min_residual")
    for c, margin, res, drift in scan(args.n, args.nonlinearity, cs, (args.drift_grid, args.drift_grid)):
        print(f"{c:.6f},{c / c_star:.4f},{margin:.6f},{res:.3e},{drift:.3e}")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
