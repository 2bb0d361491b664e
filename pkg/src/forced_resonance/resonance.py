"""Existence conditions and the integral identities behind them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroDirection
from .ode_core import (
    ForcingTerm,
    OscillatorProblem,
    SaturatingNonlinearity,
    eval_forcing,
    fourier_coefficient,
    periodic_nodes,
    simpson_rule,
)

# the clipped integrand has kinks, so the rule is only second order: the
# error is about (n / nodes)^2, which 2^15 nodes keeps below 1e-6 for n <= 5
LEMMA_NODES = 32768


@dataclass(frozen=True)
class ConditionReport:
    lhs: float
    rhs: float
    holds: bool
    margin: float
    # Dirichlet only: the raw kernel projection of e over [0, pi]
    kernel_integral: float | None = None

    @classmethod
    def compare(cls, lhs: float, rhs: float, **extra) -> "ConditionReport":
        margin = rhs - lhs
        return cls(lhs=lhs, rhs=rhs, holds=bool(margin > 0), margin=margin, **extra)


def check_periodic_condition(p: OscillatorProblem) -> ConditionReport:
    """sqrt(A_n^2 + B_n^2) < 2n (F(+inf) - F(-inf)).

    Necessary and sufficient for a 2pi-periodic solution. Exactly at the
    threshold the answer is "no", but ``margin`` near zero should be read as
    undecided.
    """
    A, B = fourier_coefficient(p.forcing, p.n)
    return ConditionReport.compare(math.hypot(A, B), 2 * p.n * p.nonlinearity.span)


def check_dirichlet_necessary(F: SaturatingNonlinearity, e: ForcingTerm) -> ConditionReport:
    """Necessary condition for x'' - F(x)' + x = e on (0, pi), x(0) = x(pi) = 0.

    ``lhs`` is the sin t amplitude of e, (2/pi) * integral of e sin t over
    [0, pi]; for e = A sin t + sin 2t it is |A|. The raw integral is kept in
    ``kernel_integral``.
    """
    t, w = simpson_rule(0.0, math.pi)
    integral = float(w @ (eval_forcing(e, t) * np.sin(t)))
    amplitude = 2.0 * integral / math.pi
    return ConditionReport.compare(abs(amplitude), F.span, kernel_integral=integral)


def lemma_positive_part_integral(n: int, phi: float, which: str = "cos",
                                 negative: bool = False, nodes: int = LEMMA_NODES) -> float:
    """Integral over (0, 2pi) of the positive (or negative) part of cos(nt - phi) or sin(nt - phi).

    Equals 2 (resp. -2) for every integer n >= 1 and every phase.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t, h = periodic_nodes(nodes)
    if which == "cos":
        g = np.cos(n * t - phi)
    elif which == "sin":
        g = np.sin(n * t - phi)
    else:
        raise ValueError(f"which must be 'cos' or 'sin', got {which!r}")
    part = np.minimum(g, 0.0) if negative else np.maximum(g, 0.0)
    return float(h * part.sum())


@dataclass(frozen=True)
class IdentityCheck:
    I: float
    rhs_identity: float
    bound: float

    @property
    def defect(self) -> float:
        return abs(self.I - self.rhs_identity)


def identity_integral(p: OscillatorProblem, sol, a: float, b: float,
                      nodes: int | None = None) -> IdentityCheck:
    """Multiply the equation by a cos nt + b sin nt and integrate over a period.

    For a periodic solution x, n * int F(x(t)) sin(nt - delta) dt must equal
    (a A_n + b B_n) / sqrt(a^2 + b^2) and be smaller in modulus than
    2n (F(+inf) - F(-inf)).

    ``sol`` is a `PeriodicSolution` (uses its uniform samples of x on
    [0, 2pi]) or an array of x values at uniform nodes ``2pi k/m``.
    """
    norm = math.hypot(a, b)
    if norm == 0.0:
        raise ZeroDirection("(a, b) must not be the zero vector")
    delta = math.atan2(b, a)
    x = _uniform_x(sol, nodes)
    m = len(x)
    t, h = periodic_nodes(m)
    I = p.n * h * float(np.sum(p.nonlinearity.F(x) * np.sin(p.n * t - delta)))
    A, B = fourier_coefficient(p.forcing, p.n)
    return IdentityCheck(I, (a * A + b * B) / norm, 2 * p.n * p.nonlinearity.span)


def _uniform_x(sol, nodes):
    if hasattr(sol, "sample_x"):
        return sol.sample_x(nodes or 1024)
    return np.asarray(sol, dtype=float)
