"""Time-2pi return map of the forced oscillator and its fixed points.

Fixed points of the return map are 2pi-periodic solutions. When the
existence condition holds, large circles in the scaled (X, Y) = (n x, y)
plane are mapped strictly inside themselves, which gives an invariant disc of
radius c3; periodic solutions are then located by damped Newton on
Phi(s) - s in Lienard coordinates. When it fails, `drift_certificate`
collects evidence that no fixed point exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import NoContractionFound, NoFixedPoint, SolverFailure
from .ode_core import (
    DEFAULT_TOL,
    ORACLE_TOL,
    TWO_PI,
    OscillatorProblem,
    PhaseState,
    Tolerances,
    Trajectory,
    fourier_coefficient,
    integrate,
    lienard_rhs,
    periodic_nodes,
    polar_rhs,
    scaled_rhs,
)

SAMPLE_INTERVALS = 1024


@dataclass(frozen=True)
class ReturnMapResult:
    r_in: float
    phi_in: float
    r_out: float
    theta_out: float

    @property
    def contraction(self) -> float:
        return self.r_out - self.r_in


@dataclass(frozen=True)
class InvariantBallReport:
    c1: float
    c2: float
    c3: float
    radii: tuple[float, ...] = ()
    # worst (largest) r_out - c over the angle grid, per tested radius
    worst_contraction: tuple[float, ...] = ()


@dataclass
class PeriodicSolution:
    initial_state: PhaseState
    samples: Trajectory  # Lienard states at 2pi k / SAMPLE_INTERVALS, k = 0..SAMPLE_INTERVALS
    residual: float
    first_harmonics: tuple[float, float]

    def sample_x(self, m: int = SAMPLE_INTERVALS) -> np.ndarray:
        """x at the m uniform nodes 2pi k/m, k < m (m must divide the sample count)."""
        total = len(self.samples.times) - 1
        if total % m:
            raise ValueError(f"{m} nodes do not divide the {total} stored intervals")
        return self.samples.states[:-1:total // m, 0]


@dataclass(frozen=True)
class SeedGrid:
    radii: int = 5
    angles: int = 8
    radius: float | None = None  # None: use c3 from invariant_radius, else 50

    def points(self, radius: float, n: int) -> np.ndarray:
        """Origin first, then rings; returned in Lienard coordinates, shape (2, M)."""
        cs = radius * np.arange(1, self.radii + 1) / self.radii
        phis = TWO_PI * np.arange(self.angles) / self.angles
        C, P = np.meshgrid(cs, phis, indexing="ij")
        X, Y = C.ravel() * np.cos(P.ravel()), C.ravel() * np.sin(P.ravel())
        return np.concatenate([[[0.0], [0.0]], np.array([X / n, Y])], axis=1)


@dataclass(frozen=True)
class DriftReport:
    min_residual: float
    argmin: tuple[float, float]  # (c, phi) of the smallest grid residual
    max_radius: float
    growth: tuple[float, ...] = field(default=())  # final r / initial r per iterated seed


# --------------------------------------------------------------------------
# return maps


def period_map(p: OscillatorProblem, states, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Phi_2pi in Lienard coordinates; ``states`` has shape (2,) or (2, M)."""
    return integrate(partial(lienard_rhs, p), 0.0, TWO_PI, states, tol).final


def return_map_grid(p: OscillatorProblem, c, phi, tol: Tolerances = DEFAULT_TOL):
    """Vectorised `return_map`: arrays (r_out, theta_out) broadcast over c and phi."""
    c, phi = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(phi, dtype=float))
    shape = c.shape
    c, phi = c.ravel(), phi.ravel()
    S0 = np.array([c * np.cos(phi), c * np.sin(phi)])
    # enough samples that successive angles differ by much less than pi
    t_eval = np.linspace(0.0, TWO_PI, 64 * p.n + 1)
    traj = integrate(partial(scaled_rhs, p), 0.0, TWO_PI, S0, tol, t_eval=t_eval)
    X, Y = traj.states[:, 0], traj.states[:, 1]
    ang = np.unwrap(np.arctan2(Y, X), axis=0)
    theta = ang[-1] - ang[0] + phi
    r_out = np.hypot(X[-1], Y[-1])
    return r_out.reshape(shape), theta.reshape(shape)


def return_map(p: OscillatorProblem, c: float, phi: float,
               tol: Tolerances = DEFAULT_TOL) -> ReturnMapResult:
    """Image of the polar point (c, phi) under the time-2pi flow of the scaled system.

    The output angle is unwrapped along the trajectory, so for large c it sits
    near phi - 2 pi n rather than being reduced mod 2pi.
    """
    if not c > 0:
        raise ValueError("initial radius must be positive")
    r_out, th = return_map_grid(p, c, phi, tol)
    return ReturnMapResult(float(c), float(phi), float(r_out), float(th))


def limiting_contraction(p: OscillatorProblem, phi):
    """lim_{c->inf} r(2pi, c, phi) - c = -2n(F+ - F-) + A_n sin phi - B_n cos phi."""
    A, B = fourier_coefficient(p.forcing, p.n)
    return -2 * p.n * p.nonlinearity.span + A * np.sin(phi) - B * np.cos(phi)


def asymptotic_deviation(p: OscillatorProblem, c: float, phi_samples: int = 32,
                         t_samples: int = 257, tol: Tolerances = ORACLE_TOL) -> tuple[float, float]:
    """max over t, phi of |r(t) - c| and of |theta(t) + n t - phi| for initial radius c."""
    phi = TWO_PI * np.arange(phi_samples) / phi_samples
    t_eval = np.linspace(0.0, TWO_PI, t_samples)
    traj = integrate(partial(polar_rhs, p), 0.0, TWO_PI, np.array([np.full_like(phi, c), phi]),
                     tol, t_eval=t_eval)
    r, th = traj.states[:, 0], traj.states[:, 1]
    t = traj.times[:, None]
    return float(np.abs(r - c).max()), float(np.abs(th + p.n * t - phi).max())


# --------------------------------------------------------------------------
# invariant disc


def invariant_radius(p: OscillatorProblem, phi_samples: int = 32, c_start: float = 8.0,
                     c_max: float = 2.0**14, margin: float = 1e-3, inner_radii: int = 16,
                     tol: Tolerances = DEFAULT_TOL, refine: bool = True) -> InvariantBallReport:
    """Radius c3 of a disc the return map sends into itself.

    c1 is the smallest radius of the doubling schedule from which on every
    tested radius contracts by more than ``margin`` at all sampled angles. c2
    is the largest image radius of points with c <= c1, found on a grid and
    polished by a local search; c3 = max(c1, c2).
    """
    radii = [c_start]
    while radii[-1] * 2 <= c_max:
        radii.append(radii[-1] * 2)
    radii = np.array(radii)
    phi = TWO_PI * np.arange(phi_samples) / phi_samples
    C, P = np.meshgrid(radii, phi, indexing="ij")
    r_out, _ = return_map_grid(p, C, P, tol)
    worst = (r_out - C).max(axis=1)
    ok = worst < -margin
    if not ok[-1]:
        raise NoContractionFound(
            f"no uniform contraction up to c={c_max:g} (worst r_out - c = {worst[-1]:.3g})"
        )
    j = len(ok) - 1
    while j > 0 and ok[j - 1]:
        j -= 1
    c1 = float(radii[j])

    cs = c1 * np.arange(inner_radii + 1) / inner_radii
    C, P = np.meshgrid(cs, phi, indexing="ij")
    inner, _ = return_map_grid(p, C, P, tol)
    c2 = float(inner.max())
    if refine:
        c2 = max(c2, _polish_max(p, C.ravel(), P.ravel(), inner.ravel(), c1, tol))
    return InvariantBallReport(c1, c2, max(c1, c2), tuple(radii.tolist()), tuple(worst.tolist()))


def _polish_max(p, cs, phis, vals, c_hi, tol, starts=3, rounds=4, width=7):
    """Zoom in on the largest grid values of r_out with shrinking local grids."""
    dc = c_hi / max(len(np.unique(cs)) - 1, 1)
    dphi = TWO_PI / max(len(np.unique(phis)), 1)
    order = np.argsort(vals)[::-1][:starts]
    centers = np.array([cs[order], phis[order]])
    best = float(vals[order[0]])
    u = np.linspace(-1.0, 1.0, width)
    for _ in range(rounds):
        C = np.clip(centers[0][:, None, None] + dc * u[:, None], 0.0, c_hi)
        P = centers[1][:, None, None] + dphi * u[None, :]
        C, P = np.broadcast_arrays(C, P)
        r, _ = return_map_grid(p, C, P, tol)
        r = r.reshape(len(order), -1)
        k = r.argmax(axis=1)
        centers = np.array([C.reshape(len(order), -1)[np.arange(len(order)), k],
                            P.reshape(len(order), -1)[np.arange(len(order)), k]])
        best = max(best, float(r.max()))
        dc, dphi = dc / 3.0, dphi / 3.0
    return best


# --------------------------------------------------------------------------
# fixed points


def _newton_batch(p, S, tol, max_iter, escape, max_halvings=30, stop_first=False):
    """Damped Newton on G(s) = Phi(s) - s for every column of S simultaneously."""
    S = S.copy()
    M = S.shape[1]
    G = period_map(p, S, tol) - S
    res = np.hypot(*G)
    active = res >= tol.fixed_point
    failed = np.zeros(M, dtype=bool)
    max_radius = float(np.hypot(*S).max())

    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0 or (stop_first and (~active & ~failed).any()):
            break
        s = S[:, idx]
        h = 1e-6 * (1.0 + np.hypot(*s))
        batch = np.concatenate([s, s + h * [[1.0], [0.0]], s + h * [[0.0], [1.0]]], axis=1)
        out = period_map(p, batch, tol) - batch
        k = idx.size
        g = out[:, :k]
        J = np.stack([(out[:, k:2 * k] - g) / h, (out[:, 2 * k:] - g) / h], axis=-1)  # (2, k, 2)
        J = np.moveaxis(J, 1, 0)  # (k, 2, 2)
        G[:, idx] = g
        res[idx] = np.hypot(*g)
        done = res[idx] < tol.fixed_point
        try:
            step = -np.linalg.solve(J, g.T[..., None])[..., 0].T
        except np.linalg.LinAlgError:
            step = np.zeros_like(g)
            singular = np.abs(np.linalg.det(J)) < 1e-300
            step[:, ~singular] = -np.linalg.solve(J[~singular], g.T[~singular][..., None])[..., 0].T
        lam = np.ones(k)
        pending = ~done
        for _ in range(max_halvings + 1):
            if not pending.any():
                break
            pi = np.flatnonzero(pending)
            trial = s[:, pi] + lam[pi] * step[:, pi]
            gt = period_map(p, trial, tol) - trial
            rt = np.hypot(*gt)
            better = rt < (1.0 - 1e-4 * lam[pi]) * res[idx[pi]]
            acc = idx[pi[better]]
            S[:, acc] = trial[:, better]
            G[:, acc] = gt[:, better]
            res[acc] = rt[better]
            pending[pi[better]] = False
            lam[pi[~better]] *= 0.5
        failed[idx[pending]] = True
        radius = np.hypot(p.n * S[0], S[1])
        max_radius = max(max_radius, float(radius[idx].max()))
        failed |= radius > escape
        active = (res >= tol.fixed_point) & ~failed
    converged = (res < tol.fixed_point) & ~failed
    return S, res, converged, max_radius


def find_fixed_points(p: OscillatorProblem, seeds: SeedGrid = SeedGrid(),
                      tol: Tolerances = ORACLE_TOL, max_iter: int = 40,
                      distinct: float = 1e-6, first_only: bool = False) -> list[PeriodicSolution]:
    """All distinct fixed points reached from the seed grid, in seed order.

    With ``first_only`` the search stops as soon as any seed converges.
    """
    radius = seeds.radius
    if radius is None:
        try:
            radius = invariant_radius(p).c3
        except SolverFailure:
            radius = 50.0
    S0 = seeds.points(radius, p.n)
    S, res, ok, max_radius = _newton_batch(p, S0, tol, max_iter, escape=20.0 * max(radius, 1.0),
                                          stop_first=first_only)
    if not ok.any():
        raise NoFixedPoint(
            f"no seed converged (best residual {res.min():.3g}, max radius {max_radius:.3g})",
            min_residual=float(res.min()), max_radius=max_radius,
        )
    found = []
    for j in np.flatnonzero(ok):
        s = S[:, j]
        if all(np.hypot(*(s - np.asarray(q.initial_state))) > distinct for q in found):
            found.append(periodic_solution(p, s, tol))
    return found


def find_fixed_point(p: OscillatorProblem, seeds: SeedGrid = SeedGrid(),
                     tol: Tolerances = ORACLE_TOL, max_iter: int = 40) -> PeriodicSolution:
    """First periodic solution found by multi-start damped Newton.

    Raises `NoFixedPoint` (with the best residual reached and the largest
    radius visited) if no seed converges.
    """
    return find_fixed_points(p, seeds, tol, max_iter, first_only=True)[0]


def periodic_solution(p: OscillatorProblem, s, tol: Tolerances = ORACLE_TOL) -> PeriodicSolution:
    """Package the orbit through Lienard state ``s`` as a `PeriodicSolution`."""
    s = np.asarray(s, dtype=float)
    t_eval = np.linspace(0.0, TWO_PI, SAMPLE_INTERVALS + 1)
    traj = integrate(partial(lienard_rhs, p), 0.0, TWO_PI, s, tol, t_eval=t_eval)
    t, h = periodic_nodes(SAMPLE_INTERVALS)
    x = traj.states[:-1, 0]
    harmonics = (h * float(x @ np.cos(p.n * t)) / math.pi, h * float(x @ np.sin(p.n * t)) / math.pi)
    return PeriodicSolution(PhaseState(float(s[0]), float(s[1])), traj,
                            float(np.hypot(*(traj.final - s))), harmonics)


def verify_periodicity(sol: PeriodicSolution, p: OscillatorProblem,
                       tol: Tolerances = ORACLE_TOL) -> float:
    """|state(2pi) - state(0)| after re-integrating from the stored initial state."""
    s = np.asarray(sol.initial_state, dtype=float)
    return float(np.hypot(*(period_map(p, s, tol) - s)))


def equation_residual(p: OscillatorProblem, state, points: int = 64, h: float = 2e-3) -> float:
    """max |x'' + f(x) x' + n^2 x - e(t)| at ``points`` interior times.

    The orbit is re-integrated with scipy's DOP853 (7th order dense output)
    and differentiated by 5-point finite differences, so the check is
    independent of both the in-house integrator and the first-order form.
    """
    from scipy.integrate import solve_ivp

    sol = solve_ivp(lambda t, s: lienard_rhs(p, t, s), (0.0, TWO_PI), np.asarray(state, dtype=float),
                    method="DOP853", rtol=1e-13, atol=1e-14, dense_output=True)
    tk = TWO_PI * (np.arange(points) + 0.5) / points
    x = np.array([sol.sol(tk + k * h)[0] for k in range(-2, 3)])
    d1 = (x[0] - 8 * x[1] + 8 * x[3] - x[4]) / (12 * h)
    d2 = (-x[0] + 16 * x[1] - 30 * x[2] + 16 * x[3] - x[4]) / (12 * h * h)
    r = d2 + p.nonlinearity.f(x[2]) * d1 + p.n**2 * x[2] - p.forcing(tk)
    return float(np.abs(r).max())


# --------------------------------------------------------------------------
# nonexistence evidence


def drift_certificate(p: OscillatorProblem, radius: float = 50.0, grid: tuple[int, int] = (32, 32),
                      iterations: int = 20, n_seeds: int = 8,
                      tol: Tolerances = DEFAULT_TOL) -> DriftReport:
    """Smallest |Phi(s) - s| over a polar grid of the disc, plus radial growth under iteration.

    The grid runs over c in [0, radius] (origin included) and ``grid[1]``
    angles; residuals are measured in Lienard coordinates. The iterated seeds
    start on the circle of radius ``radius``.
    """
    nc, nphi = grid
    cs = np.linspace(0.0, radius, nc)
    phis = TWO_PI * np.arange(nphi) / nphi
    C, P = np.meshgrid(cs, phis, indexing="ij")
    S = np.array([C.ravel() * np.cos(P.ravel()) / p.n, C.ravel() * np.sin(P.ravel())])
    res = np.hypot(*(period_map(p, S, tol) - S))
    i = int(res.argmin())

    seed_phi = TWO_PI * np.arange(n_seeds) / n_seeds
    Z = np.array([radius * np.cos(seed_phi) / p.n, radius * np.sin(seed_phi)])
    max_r = radius
    for _ in range(iterations):
        Z = period_map(p, Z, tol)
        max_r = max(max_r, float(np.hypot(p.n * Z[0], Z[1]).max()))
    growth = tuple((np.hypot(p.n * Z[0], Z[1]) / radius).tolist()) if radius > 0 else ()
    return DriftReport(float(res[i]), (float(C.ravel()[i]), float(P.ravel()[i])), max_r, growth)
