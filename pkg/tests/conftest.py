import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from forced_resonance import ForcingTerm, OscillatorProblem, SaturatingNonlinearity  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sigmoid():
    return SaturatingNonlinearity.from_kind("sigmoid")


@pytest.fixture(scope="session")
def linear():
    return SaturatingNonlinearity.from_kind("zero")


def cos_forced(n, c, kind="sigmoid"):
    """sigmoid damping, e(t) = c cos nt."""
    return OscillatorProblem(n, SaturatingNonlinearity.from_kind(kind), ForcingTerm.from_modes(cos={n: c}))


def threshold(n):
    return 4 * n / math.pi


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# below-threshold instances: (n, c)
SUB_THRESHOLD = [(1, 0.5), (1, 1.0), (1, 1.2), (2, 1.0), (2, 2.0)]
SUPER_THRESHOLD = [(1, 1.5), (1, 3.0)]


@pytest.fixture(scope="session")
def periodic_solutions():
    """{(n, c): (problem, PeriodicSolution)} for the below-threshold family."""
    from forced_resonance import find_fixed_point

    out = {}
    for n, c in SUB_THRESHOLD:
        p = cos_forced(n, c)
        out[(n, c)] = (p, find_fixed_point(p))
    return out
