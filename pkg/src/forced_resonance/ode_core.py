"""Problem data, vector fields and the adaptive integrator.

The oscillator x'' + f(x) x' + n^2 x = e(t) is handled in three equivalent
first-order forms:

* Lienard plane (x, y) with y = x' + F(x)
* scaled plane (X, Y) = (n x, y)
* polar form (r, theta) of the scaled plane, theta unwrapped

All vector fields accept states of shape ``(2,)`` or ``(2, M)``; the second
form integrates M trajectories in lockstep, which is how grids of initial
conditions are pushed through the return map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import RadiusTooSmall, StepSizeUnderflow

TWO_PI = 2.0 * math.pi
R_FLOOR = 1e-3

Array = np.ndarray
VectorField = Callable[[float, Array], Array]


# --------------------------------------------------------------------------
# nonlinearities


def _sigmoid(x):
    return x / np.sqrt(x * x + 1.0)


def _sigmoid_prime(x):
    return (x * x + 1.0) ** -1.5


def _atan_scaled(x):
    return (2.0 / np.pi) * np.arctan(x)


def _atan_scaled_prime(x):
    return (2.0 / np.pi) / (1.0 + x * x)


def _tanh_prime(x):
    return 1.0 / np.cosh(np.clip(x, -350.0, 350.0)) ** 2


def _zero(x):
    return 0.0 * np.asarray(x, dtype=float)


# kind -> (F, f, F(+inf), F(-inf))
_CATALOG = {
    "sigmoid": (_sigmoid, _sigmoid_prime, 1.0, -1.0),
    "atan_scaled": (_atan_scaled, _atan_scaled_prime, 1.0, -1.0),
    "tanh": (np.tanh, _tanh_prime, 1.0, -1.0),
    # f == 0: the linear oscillator. Violates the strict bounds on F, kept
    # for the closed-form checks.
    "zero": (_zero, _zero, 0.0, 0.0),
}

CATALOG_KINDS = tuple(_CATALOG)


@dataclass(frozen=True)
class SaturatingNonlinearity:
    """Antiderivative F of the damping f, with finite limits at +-infinity."""

    kind: str
    F: Callable = field(compare=False, repr=False)
    f: Callable = field(compare=False, repr=False)
    F_plus: float
    F_minus: float

    @classmethod
    def from_kind(cls, kind: str) -> "SaturatingNonlinearity":
        try:
            F, f, plus, minus = _CATALOG[kind]
        except KeyError:
            raise ValueError(
                f"unknown nonlinearity {kind!r}; expected one of {CATALOG_KINDS}"
            ) from None
        return cls(kind, F, f, plus, minus)

    @property
    def span(self) -> float:
        """F(+inf) - F(-inf)."""
        return self.F_plus - self.F_minus


@dataclass(frozen=True)
class ForcingTerm:
    """Trigonometric polynomial a0 + sum_k a_k cos kt + b_k sin kt.

    ``cosine_coeffs[k-1]`` is a_k and ``sine_coeffs[k-1]`` is b_k.
    """

    cosine_coeffs: tuple[float, ...] = ()
    sine_coeffs: tuple[float, ...] = ()
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "cosine_coeffs", tuple(float(a) for a in self.cosine_coeffs))
        object.__setattr__(self, "sine_coeffs", tuple(float(b) for b in self.sine_coeffs))
        object.__setattr__(self, "constant", float(self.constant))

    @classmethod
    def from_modes(cls, cos: dict[int, float] | None = None, sin: dict[int, float] | None = None,
                   constant: float = 0.0) -> "ForcingTerm":
        """Build from sparse ``{k: coefficient}`` maps, e.g. ``sin={2: 1.0}``."""
        cos = cos or {}
        sin = sin or {}
        if any(k < 1 for k in (*cos, *sin)):
            raise ValueError("harmonic indices start at 1")
        a = [0.0] * max(cos, default=0)
        b = [0.0] * max(sin, default=0)
        for k, v in cos.items():
            a[k - 1] = v
        for k, v in sin.items():
            b[k - 1] = v
        return cls(tuple(a), tuple(b), constant)

    def coefficient(self, k: int) -> tuple[float, float]:
        """(a_k, b_k), zero beyond the stored length."""
        a = self.cosine_coeffs[k - 1] if 1 <= k <= len(self.cosine_coeffs) else 0.0
        b = self.sine_coeffs[k - 1] if 1 <= k <= len(self.sine_coeffs) else 0.0
        return a, b

    def scaled(self, s: float) -> "ForcingTerm":
        return ForcingTerm(
            tuple(s * a for a in self.cosine_coeffs),
            tuple(s * b for b in self.sine_coeffs),
            s * self.constant,
        )

    def __call__(self, t):
        return eval_forcing(self, t)


@dataclass(frozen=True)
class OscillatorProblem:
    """x'' + f(x) x' + n^2 x = e(t) with integer resonance order n >= 1."""

    n: int
    nonlinearity: SaturatingNonlinearity
    forcing: ForcingTerm = ForcingTerm()

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"resonance order must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


class PhaseState(NamedTuple):
    x: float
    y: float


class PolarState(NamedTuple):
    r: float
    theta: float


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-8
    abs: float = 1e-10
    fixed_point: float = 1e-9

    def __post_init__(self):
        if not (self.rel > 0 and self.abs > 0 and self.fixed_point > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerances()
ORACLE_TOL = Tolerances(rel=1e-10, abs=1e-12)


# --------------------------------------------------------------------------
# vector fields


def eval_forcing(e: ForcingTerm, t):
    """e(t); ``t`` may be a float or an array."""
    if np.ndim(t) == 0:
        t = float(t)
        val = e.constant
        for k, a in enumerate(e.cosine_coeffs, start=1):
            if a:
                val += a * math.cos(k * t)
        for k, b in enumerate(e.sine_coeffs, start=1):
            if b:
                val += b * math.sin(k * t)
        return val
    t = np.asarray(t, dtype=float)
    val = np.full_like(t, e.constant)
    for k, a in enumerate(e.cosine_coeffs, start=1):
        if a:
            val += a * np.cos(k * t)
    for k, b in enumerate(e.sine_coeffs, start=1):
        if b:
            val += b * np.sin(k * t)
    return val


def lienard_rhs(p: OscillatorProblem, t: float, s) -> Array:
    """(x', y') = (-F(x) + y, -n^2 x + e(t))."""
    x, y = np.asarray(s, dtype=float)
    return np.array([-p.nonlinearity.F(x) + y, -p.n**2 * x + eval_forcing(p.forcing, t)])


def scaled_rhs(p: OscillatorProblem, t: float, s) -> Array:
    """Same flow in (X, Y) = (n x, y)."""
    X, Y = np.asarray(s, dtype=float)
    n = p.n
    return np.array([-n * p.nonlinearity.F(X / n) + n * Y, -n * X + eval_forcing(p.forcing, t)])


def polar_rhs(p: OscillatorProblem, t: float, s, r_floor: float = R_FLOOR) -> Array:
    """(r', theta') of the scaled flow. Raises `RadiusTooSmall` at or below ``r_floor``."""
    r, th = np.asarray(s, dtype=float)
    if np.any(r <= r_floor):
        raise RadiusTooSmall(f"radius {np.min(r):.3g} at t={t:.6g} is at or below the floor {r_floor}")
    n = p.n
    c, sn = np.cos(th), np.sin(th)
    Fv = n * p.nonlinearity.F(r * c / n)
    e = eval_forcing(p.forcing, t)
    return np.array([-Fv * c + e * sn, -n + (Fv * sn + e * c) / r])


def lienard_to_scaled(s, n: int) -> Array:
    x, y = np.asarray(s, dtype=float)
    return np.array([n * x, y])


def scaled_to_lienard(S, n: int) -> Array:
    X, Y = np.asarray(S, dtype=float)
    return np.array([X / n, Y])


def to_polar(S, theta_ref=None) -> Array:
    """Scaled Cartesian -> (r, theta); theta is moved to the branch nearest ``theta_ref``."""
    X, Y = np.asarray(S, dtype=float)
    th = np.arctan2(Y, X)
    if theta_ref is not None:
        th = th + TWO_PI * np.round((theta_ref - th) / TWO_PI)
    return np.array([np.hypot(X, Y), th])


def from_polar(P) -> Array:
    r, th = np.asarray(P, dtype=float)
    return np.array([r * np.cos(th), r * np.sin(th)])


# --------------------------------------------------------------------------
# Dormand-Prince 5(4)

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [np.array(row) for row in [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]]
_B = np.append(_A[6], 0.0)
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension: y(t + s h) = y + h * sum_i k_i * (P[i] @ [s, s^2, s^3, s^4])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_BETA = 0.04  # PI controller gain on the previous error
_EXPO = 0.2 - 0.75 * _BETA
_FAC_MIN, _FAC_MAX = 0.2, 10.0


@dataclass
class Trajectory:
    times: Array
    states: Array  # shape (len(times), *state_shape)
    accepted_steps: int = 0
    rejected_steps: int = 0

    @property
    def final(self) -> Array:
        return self.states[-1]


def _err_norm(v: Array, scale: Array) -> float:
    # RMS over the state components, worst case over batched trajectories
    z = (v / scale) ** 2
    return float(np.sqrt(z.reshape(z.shape[0], -1).mean(axis=0)).max())


def _initial_step(fun, t0, y0, f0, tol, span, shape):
    scale = (tol.abs + tol.rel * np.abs(y0)).reshape(shape)
    d0, d1 = _err_norm(y0.reshape(shape), scale), _err_norm(f0.reshape(shape), scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = fun(t0 + h0, y0 + h0 * f0)
    d2 = _err_norm((f1 - f0).reshape(shape), scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate(
    rhs: VectorField,
    t0: float,
    t1: float,
    s0,
    tol: Tolerances = DEFAULT_TOL,
    t_eval: Sequence[float] | None = None,
    max_steps: int = 1_000_000,
    max_step: float = math.inf,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1`` with error control.

    Without ``t_eval`` the trajectory holds every accepted step. With it, the
    states are interpolated (4th order continuous extension) at the requested
    times; ``t0`` and ``t1`` are always included. ``max_step`` caps the step
    size, which keeps the error estimator from striding over features narrower
    than the step (the polar field near cos theta = 0 at large radius).
    """
    t0, t1 = float(t0), float(t1)
    if not t1 > t0:
        raise ValueError("integration requires t1 > t0")
    y0 = np.array(s0, dtype=float)
    shape = y0.shape
    span = t1 - t0

    def fun(t, v):
        return np.asarray(rhs(t, v.reshape(shape)), dtype=float).reshape(-1)

    y = y0.reshape(-1)
    if t_eval is not None:
        te = np.unique(np.concatenate([[t0], np.asarray(t_eval, dtype=float), [t1]]))
        if te[0] < t0 or te[-1] > t1:
            raise ValueError("t_eval must lie within [t0, t1]")
        out_t, out_y = te, np.empty((len(te), y.size))
        out_y[0] = y
        next_i = 1
    else:
        out_t, out_y = [t0], [y.copy()]

    f = fun(t0, y)
    h = min(_initial_step(fun, t0, y, f, tol, span, shape), max_step)
    t = t0
    err_old = 1e-4
    accepted = rejected = 0
    K = np.empty((7, y.size))
    rejected_last = False

    while t < t1:
        if accepted + rejected >= max_steps:
            raise StepSizeUnderflow(f"exceeded {max_steps} steps at t={t:.6g}")
        if h < 10 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepSizeUnderflow(f"step size {h:.3g} underflow at t={t:.6g}")
        last = t + h >= t1
        if last:
            h = t1 - t

        K[0] = f
        for i in range(1, 7):
            K[i] = fun(t + _C[i] * h, y + h * (_A[i] @ K[:i]))
        y_new = y + h * (_B[:6] @ K[:6])
        err_vec = h * (_E @ K)
        scale = tol.abs + tol.rel * np.maximum(np.abs(y), np.abs(y_new))
        err = _err_norm(err_vec.reshape(shape), scale.reshape(shape))

        if err <= 1.0:
            t_new = t1 if last else t + h
            if t_eval is not None:
                j = next_i
                while j < len(out_t) and out_t[j] <= t_new:
                    j += 1
                if j > next_i:
                    s = (out_t[next_i:j] - t) / h
                    powers = np.stack([s, s**2, s**3, s**4], axis=1)
                    out_y[next_i:j] = y + h * ((powers @ _P.T) @ K)
                    next_i = j
            else:
                out_t.append(t_new)
                out_y.append(y_new.copy())
            accepted += 1
            fac = err ** _EXPO / err_old**_BETA / _SAFETY if err > 0 else 1.0 / _FAC_MAX
            fac = min(max(fac, 1.0 / _FAC_MAX), 1.0 / _FAC_MIN)
            h_new = min(h / fac, max_step)
            if rejected_last:
                h_new = min(h_new, h)
            err_old = max(err, 1e-4)
            t, y, f = t_new, y_new, K[6].copy()
            h = h_new
            rejected_last = False
        else:
            rejected += 1
            h = h / min(1.0 / _FAC_MIN, err ** _EXPO / _SAFETY)
            rejected_last = True

    if t_eval is not None:
        out_y[-1] = y
        return Trajectory(out_t, out_y.reshape((len(out_t),) + shape), accepted, rejected)
    return Trajectory(np.array(out_t), np.array(out_y).reshape((len(out_t),) + shape),
                      accepted, rejected)


def flow(rhs: VectorField, s0, t1: float = TWO_PI, tol: Tolerances = DEFAULT_TOL) -> Array:
    """Terminal state of ``integrate`` from t=0."""
    return integrate(rhs, 0.0, t1, s0, tol).final


# --------------------------------------------------------------------------
# quadrature

PERIODIC_NODES = 1024
SIMPSON_PANELS = 512


def periodic_nodes(m: int = PERIODIC_NODES) -> tuple[Array, float]:
    """Uniform nodes on [0, 2pi) and the trapezoid weight 2pi/m."""
    return np.arange(m) * (TWO_PI / m), TWO_PI / m


def simpson_rule(a: float, b: float, panels: int = SIMPSON_PANELS) -> tuple[Array, Array]:
    """Nodes and weights of composite Simpson with an even number of panels."""
    if panels % 2:
        raise ValueError("Simpson needs an even number of panels")
    t = np.linspace(a, b, panels + 1)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return t, w * (b - a) / (3.0 * panels)


def fourier_coefficient(e: ForcingTerm, n: int, method: str = "analytic",
                        nodes: int = PERIODIC_NODES) -> tuple[float, float]:
    """(A_n, B_n) = integrals of e(t) cos nt and e(t) sin nt over one period."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "analytic":
        a, b = e.coefficient(n)
        return math.pi * a, math.pi * b
    if method == "quadrature":
        t, w = periodic_nodes(nodes)
        et = eval_forcing(e, t)
        return float(w * np.sum(et * np.cos(n * t))), float(w * np.sum(et * np.sin(n * t)))
    raise ValueError(f"unknown method {method!r}")
