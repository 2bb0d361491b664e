"""Dirichlet problem x'' - F(x)' + x = A sin t + e(t) on (0, pi), x(0) = x(pi) = 0.

The kernel of the linear part is sin t. Solutions are written as
x = xi sin t + sum_{k=2..N} x_k sin kt and, for each first-harmonic amplitude
xi, Newton solves the N Galerkin equations for the unknowns (A, x_2..x_N).
Sweeping xi traces the curve A(xi); its minimum is the fold A0, and the
number of solutions at a given A is the number of times the curve crosses it.

``-F(x)'`` is never differentiated: its projection on sin kt is integrated by
parts to k * int F(x) cos kt dt, the boundary terms vanishing because
sin 0 = sin k pi = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import FoldOnBoundary, NewtonDiverged, SweepIncomplete
from .ode_core import SaturatingNonlinearity, simpson_rule

RESIDUAL_GATE = 1e-9
# F(xi sin t) steepens near the ends as |xi| grows; Simpson's h^4 error at
# 4096 panels stays near 1e-11 up to |xi| = 20 (512 panels gives 6e-8 there)
GALERKIN_PANELS = 4096
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class DirichletProblem:
    """Forcing is ``A sin t + sum_k shape[k] sin kt``; ``A`` is unknown along a curve."""

    nonlinearity: SaturatingNonlinearity
    A: float = 0.0
    shape: tuple[tuple[int, float], ...] = ((2, 1.0),)
    modes: int = 16

    def __post_init__(self):
        if self.modes < 2:
            raise ValueError("need at least two Galerkin modes")
        shape = tuple(sorted((int(k), float(v)) for k, v in dict(self.shape).items()))
        for k, _ in shape:
            if not 2 <= k <= self.modes:
                raise ValueError(f"forcing mode sin {k}t is outside 2..{self.modes}")
        object.__setattr__(self, "shape", shape)

    def shape_vector(self) -> np.ndarray:
        """Sine coefficients of the forcing beyond the kernel, modes 1..N (mode 1 is 0)."""
        v = np.zeros(self.modes)
        for k, c in self.shape:
            v[k - 1] = c
        return v


@dataclass(frozen=True)
class SolutionCurvePoint:
    xi: float
    A: float
    coeffs: tuple[float, ...]  # x_2..x_N
    residual: float

    def sine_coeffs(self) -> np.ndarray:
        return np.concatenate([[self.xi], self.coeffs])

    def x(self, t) -> np.ndarray:
        c = self.sine_coeffs()
        k = np.arange(1, len(c) + 1)
        return c @ np.sin(np.outer(k, np.atleast_1d(t)))


@dataclass
class SolutionCurve:
    points: list[SolutionCurvePoint]
    xi_range: tuple[float, float]
    step: float
    problem: DirichletProblem = field(repr=False, default=None)

    @property
    def xi(self) -> np.ndarray:
        return np.array([q.xi for q in self.points])

    @property
    def A(self) -> np.ndarray:
        return np.array([q.A for q in self.points])


class FoldResult(NamedTuple):
    A0: float
    xi_at_fold: float
    flat: bool = False


@lru_cache(maxsize=16)
def _galerkin_tables(modes: int, panels: int):
    t, w = simpson_rule(0.0, math.pi, panels)
    k = np.arange(1, modes + 1)
    sin_kt = np.sin(np.outer(k, t))
    # row k: k * w(t) cos kt, so that table @ F(x) = k * int F(x) cos kt dt
    by_parts = k[:, None] * np.cos(np.outer(k, t)) * w
    return t, w, sin_kt, by_parts


def galerkin_residual(dp: DirichletProblem, xi: float, A: float, coeffs,
                      panels: int = GALERKIN_PANELS) -> np.ndarray:
    """Projections on sin kt, k = 1..N, of x'' + x - F(x)' - e.

    Component k is (1 - k^2) x_k pi/2 + k int F(x) cos kt dt - <e, sin kt>.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (dp.modes - 1,):
        raise ValueError(f"expected {dp.modes - 1} coefficients, got {coeffs.shape}")
    _, _, sin_kt, by_parts = _galerkin_tables(dp.modes, panels)
    c = np.concatenate([[xi], coeffs])
    k = np.arange(1, dp.modes + 1)
    x = c @ sin_kt
    e = dp.shape_vector()
    e[0] += A
    return (1 - k * k) * c * HALF_PI + by_parts @ dp.nonlinearity.F(x) - e * HALF_PI


def _newton(fun, u, tol=RESIDUAL_GATE, max_iter=50, max_halvings=30):
    r = fun(u)
    nr = np.linalg.norm(r)
    for _ in range(max_iter):
        if nr < tol:
            return u, nr
        J = np.empty((len(r), len(u)))
        for j in range(len(u)):
            h = 1e-7 * (1.0 + abs(u[j]))
            up = u.copy()
            up[j] += h
            J[:, j] = (fun(up) - r) / h
        try:
            du = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            raise NewtonDiverged("singular Jacobian", residual=nr) from None
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = u + lam * du
            rt = fun(trial)
            nt = np.linalg.norm(rt)
            if nt < (1.0 - 1e-4 * lam) * nr or nt < tol:
                break
            lam *= 0.5
        else:
            raise NewtonDiverged("line search failed", residual=nr)
        u, r, nr = trial, rt, nt
    if nr < tol:
        return u, nr
    raise NewtonDiverged(f"no convergence in {max_iter} iterations", residual=nr)


def solve_at_xi(dp: DirichletProblem, xi: float,
                warm: SolutionCurvePoint | None = None) -> SolutionCurvePoint:
    """The amplitude A and higher modes of the solution whose first harmonic is ``xi``."""
    if warm is not None and len(warm.coeffs) == dp.modes - 1:
        u0 = np.concatenate([[warm.A], warm.coeffs])
    else:
        u0 = np.zeros(dp.modes)
    u, res = _newton(lambda u: galerkin_residual(dp, xi, u[0], u[1:]), u0)
    return SolutionCurvePoint(float(xi), float(u[0]), tuple(u[1:].tolist()), float(res))


def sweep_curve(dp: DirichletProblem, xi_lo: float = -20.0, xi_hi: float = 20.0,
                step: float = 0.05, max_halvings: int = 6) -> SolutionCurve:
    """March xi over a uniform grid with warm starts.

    If Newton fails, the step towards the next grid point is halved (up to
    ``max_halvings`` times) and the intermediate points serve as warm starts.
    Raises `SweepIncomplete` carrying the partial curve.
    """
    if not xi_lo < xi_hi or not step > 0:
        raise ValueError("need xi_lo < xi_hi and step > 0")
    m = max(1, int(round((xi_hi - xi_lo) / step)))
    grid = np.linspace(xi_lo, xi_hi, m + 1)
    curve = SolutionCurve([], (float(xi_lo), float(xi_hi)), float(step), dp)
    warm = None
    for target in grid:
        try:
            warm = _advance(dp, warm, float(target), max_halvings)
        except NewtonDiverged as exc:
            raise SweepIncomplete(f"sweep stalled before xi={target:.6g}: {exc}",
                                  partial=curve, xi_failed=float(target)) from exc
        curve.points.append(warm)
    return curve


def _advance(dp, warm, target, max_halvings):
    if warm is None:
        return solve_at_xi(dp, target)
    try:
        return solve_at_xi(dp, target, warm)
    except NewtonDiverged:
        if max_halvings == 0:
            raise
    mid = 0.5 * (warm.xi + target)
    half = _advance(dp, warm, mid, max_halvings - 1)
    return _advance(dp, half, target, max_halvings - 1)


def _nearest(curve: SolutionCurve, xi: float) -> SolutionCurvePoint:
    return curve.points[int(np.abs(curve.xi - xi).argmin())]


def find_fold(curve: SolutionCurve, xtol: float = 1e-6) -> FoldResult:
    """Global minimum A0 of A(xi), refined by golden-section search on `solve_at_xi`."""
    if not curve.points:
        raise ValueError("empty curve")
    A = curve.A
    xi = curve.xi
    if A.max() - A.min() < 1e-12:
        return FoldResult(float(A.min()), float(xi[A.argmin()]), True)
    i = int(A.argmin())
    if i == 0 or i == len(A) - 1:
        raise FoldOnBoundary(f"minimum of A at the sweep endpoint xi={xi[i]:.6g}")
    dp = curve.problem
    cache = {}

    def A_of(s):
        if s not in cache:
            cache[s] = solve_at_xi(dp, s, _nearest(curve, s)).A
        return cache[s]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(xi[i - 1]), float(xi[i + 1])
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    while b - a > xtol:
        if A_of(c) < A_of(d):
            b, d = d, c
            c = b - invphi * (b - a)
        else:
            a, c = c, d
            d = a + invphi * (b - a)
    s = 0.5 * (a + b)
    best = min([(A_of(s), s), (float(A[i]), float(xi[i]))])
    return FoldResult(best[0], best[1], False)


def solutions_at(curve: SolutionCurve, A_query: float, xtol: float = 1e-8) -> list[float]:
    """xi values where A(xi) = A_query, one per bracketing interval of the curve.

    Each bracket is narrowed by bisection with fresh `solve_at_xi` calls, so a
    sign change produced by a jump between solution branches would show up
    as a failed bisection rather than a spurious root.
    """
    A = curve.A - A_query
    xi = curve.xi
    roots = []
    for j in range(len(A)):
        if A[j] == 0.0:
            roots.append(float(xi[j]))
        elif j + 1 < len(A) and A[j] * A[j + 1] < 0:
            lo, hi = curve.points[j], curve.points[j + 1]
            glo = A[j]
            while hi.xi - lo.xi > xtol:
                mid = solve_at_xi(curve.problem, 0.5 * (lo.xi + hi.xi), lo)
                gm = mid.A - A_query
                if gm == 0.0:
                    lo = hi = mid
                    break
                if (gm < 0) == (glo < 0):
                    lo, glo = mid, gm
                else:
                    hi = mid
            roots.append(0.5 * (lo.xi + hi.xi))
    return roots


def count_solutions(curve: SolutionCurve, A_query: float) -> int:
    """Number of solutions of the Dirichlet problem with forcing amplitude ``A_query``."""
    return len(solutions_at(curve, A_query))


def collocation_residual(point: SolutionCurvePoint, dp: DirichletProblem,
                         nodes: int = 2001) -> float:
    """max |x'' - f(x) x' + x - e| by second-order central differences on a uniform grid.

    The truncated sine series satisfies x'' = 0 at both ends while the exact
    solution has x''(0) = f(0) x'(0), so this pointwise measure stays O(1)
    near the boundary for any finite number of modes.
    """
    t = np.linspace(0.0, math.pi, nodes)
    h = t[1] - t[0]
    x = point.x(t)
    xpp = (x[2:] - 2 * x[1:-1] + x[:-2]) / h**2
    xp = (x[2:] - x[:-2]) / (2 * h)
    ti = t[1:-1]
    e = point.A * np.sin(ti) + sum(c * np.sin(k * ti) for k, c in dp.shape)
    r = xpp - dp.nonlinearity.f(x[1:-1]) * xp + x[1:-1] - e
    return float(np.abs(r).max())


def with_modes(dp: DirichletProblem, modes: int) -> DirichletProblem:
    return replace(dp, modes=modes)
