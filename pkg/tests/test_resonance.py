import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forced_resonance import (
    ForcingTerm,
    OscillatorProblem,
    SaturatingNonlinearity,
    ZeroDirection,
    check_dirichlet_necessary,
    check_periodic_condition,
    identity_integral,
    lemma_positive_part_integral,
)
from forced_resonance.ode_core import CATALOG_KINDS

from conftest import cos_forced

SATURATING = [k for k in CATALOG_KINDS if k != "zero"]


# ------------------------------------------------------------- periodic condition


def test_condition_below_threshold():
    rep = check_periodic_condition(cos_forced(1, 1.0))
    assert rep.lhs == pytest.approx(math.pi, abs=1e-12)
    assert rep.rhs == pytest.approx(4.0, abs=1e-12)
    assert rep.holds and rep.margin > 0


def test_condition_above_threshold():
    rep = check_periodic_condition(cos_forced(1, 1.5))
    assert rep.lhs == pytest.approx(1.5 * math.pi, abs=1e-12)
    assert not rep.holds and rep.margin < 0


@pytest.mark.parametrize("kind", SATURATING)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_condition_zero_forcing(kind, n):
    p = OscillatorProblem(n, SaturatingNonlinearity.from_kind(kind), ForcingTerm())
    rep = check_periodic_condition(p)
    assert rep.lhs == 0.0 and rep.holds


def test_condition_uses_only_resonant_mode():
    # forcing in modes other than n leaves the left side untouched
    F = SaturatingNonlinearity.from_kind("sigmoid")
    e = ForcingTerm.from_modes(cos={1: 0.3, 3: 5.0}, sin={2: 7.0}, constant=2.0)
    rep = check_periodic_condition(OscillatorProblem(1, F, e))
    assert rep.lhs == pytest.approx(0.3 * math.pi, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_threshold_amplitude(n):
    F = SaturatingNonlinearity.from_kind("sigmoid")
    c = 4 * n / math.pi
    below = check_periodic_condition(OscillatorProblem(n, F, ForcingTerm.from_modes(cos={n: c * 0.999})))
    above = check_periodic_condition(OscillatorProblem(n, F, ForcingTerm.from_modes(sin={n: c * 1.001})))
    assert below.holds and not above.holds


coeff = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(a=coeff, b=coeff, s=st.floats(0.01, 20), n=st.integers(1, 4),
       kind=st.sampled_from(SATURATING))
def test_scaling_multiplies_lhs(a, b, s, n, kind):
    F = SaturatingNonlinearity.from_kind(kind)
    e = ForcingTerm.from_modes(cos={n: a}, sin={n: b}, constant=0.5)
    r1 = check_periodic_condition(OscillatorProblem(n, F, e))
    r2 = check_periodic_condition(OscillatorProblem(n, F, e.scaled(s)))
    assert r2.lhs == pytest.approx(s * r1.lhs, rel=1e-12, abs=1e-13)
    assert r2.rhs == r1.rhs


@settings(max_examples=60, deadline=None)
@given(a=coeff, b=coeff, n=st.integers(1, 4), kind=st.sampled_from(SATURATING))
def test_holds_iff_margin_positive(a, b, n, kind):
    F = SaturatingNonlinearity.from_kind(kind)
    rep = check_periodic_condition(OscillatorProblem(n, F, ForcingTerm.from_modes(cos={n: a}, sin={n: b})))
    assert rep.holds == (rep.lhs < rep.rhs) == (rep.margin > 0)
    assert rep.margin == rep.rhs - rep.lhs


# ------------------------------------------------------------- Dirichlet condition


def _dirichlet_forcing(A):
    return ForcingTerm.from_modes(sin={1: A, 2: 1.0})


def test_dirichlet_condition_holds_below_two(sigmoid):
    rep = check_dirichlet_necessary(sigmoid, _dirichlet_forcing(1.9))
    assert rep.lhs == pytest.approx(1.9, abs=1e-10)
    assert rep.rhs == pytest.approx(2.0)
    assert rep.holds
    # the raw kernel projection is A pi/2
    assert rep.kernel_integral == pytest.approx(1.9 * math.pi / 2, abs=1e-10)


def test_dirichlet_condition_fails_above_two(sigmoid):
    rep = check_dirichlet_necessary(sigmoid, _dirichlet_forcing(-2.5))
    assert rep.lhs == pytest.approx(2.5, abs=1e-10)
    assert not rep.holds


def test_dirichlet_condition_zero_forcing(sigmoid):
    rep = check_dirichlet_necessary(sigmoid, ForcingTerm())
    assert rep.lhs == 0.0 and rep.holds


def test_dirichlet_condition_ignores_higher_sines(sigmoid):
    rep = check_dirichlet_necessary(sigmoid, ForcingTerm.from_modes(sin={2: 3.0, 5: -1.0}))
    assert rep.lhs < 1e-12


# ------------------------------------------------------------- positive parts


def test_lemma_examples():
    assert lemma_positive_part_integral(1, 0.0, "cos") == pytest.approx(2.0, abs=1e-6)
    assert lemma_positive_part_integral(3, 1.7, "sin") == pytest.approx(2.0, abs=1e-6)
    assert lemma_positive_part_integral(2, math.pi / 5, "cos", negative=True) == pytest.approx(-2.0, abs=1e-6)


@pytest.mark.parametrize("which", ["cos", "sin"])
@pytest.mark.parametrize("n", range(1, 6))
def test_lemma_sweep(n, which):
    for phi in 2 * math.pi * np.arange(32) / 32:
        assert abs(lemma_positive_part_integral(n, phi, which) - 2.0) < 1e-6
        assert abs(lemma_positive_part_integral(n, phi, which, negative=True) + 2.0) < 1e-6


def test_lemma_rejects_bad_input():
    with pytest.raises(ValueError):
        lemma_positive_part_integral(0, 0.0)
    with pytest.raises(ValueError):
        lemma_positive_part_integral(1, 0.0, "tan")


# ------------------------------------------------------------- integral identity


def test_identity_trivial_solution(sigmoid):
    p = OscillatorProblem(1, sigmoid, ForcingTerm())
    chk = identity_integral(p, np.zeros(256), 0.3, -2.0)
    assert chk.I == 0.0 and chk.rhs_identity == 0.0 and chk.bound == 4.0


def test_identity_zero_direction(sigmoid):
    with pytest.raises(ZeroDirection):
        identity_integral(OscillatorProblem(1, sigmoid, ForcingTerm()), np.zeros(8), 0.0, 0.0)


def test_identity_examples(periodic_solutions):
    p, sol = periodic_solutions[(1, 1.0)]
    c = identity_integral(p, sol, 1.0, 0.0)
    assert c.rhs_identity == pytest.approx(math.pi, abs=1e-12)
    assert c.defect < 1e-4
    s = identity_integral(p, sol, 0.0, 1.0)
    assert abs(s.rhs_identity) < 1e-12
    assert s.defect < 1e-4


def test_identity_on_every_solution(periodic_solutions):
    rng = np.random.default_rng(7)
    for (n, c), (p, sol) in periodic_solutions.items():
        for a in rng.uniform(0, 2 * math.pi, 16):
            chk = identity_integral(p, sol, math.cos(a), math.sin(a))
            assert chk.defect < 1e-4, (n, c)
            assert abs(chk.I) < chk.bound


def test_identity_is_direction_scale_free(periodic_solutions):
    p, sol = periodic_solutions[(2, 1.0)]
    a = identity_integral(p, sol, 0.6, 0.8)
    b = identity_integral(p, sol, 6.0, 8.0)
    assert a.I == pytest.approx(b.I, rel=1e-12)
    assert a.rhs_identity == pytest.approx(b.rhs_identity, rel=1e-12)
