import math
from fractions import Fraction

import pytest

from multical import FiniteDistribution, LabeledSample, build_lower_bound_fixture

GRID = (0.05, 0.1, 0.2)


@pytest.fixture
def fixture_01():
    """Two-coin construction at epsilon=0.1, gamma=psi=0.5."""
    return build_lower_bound_fixture(0.1, 0.5, 0.5)


def proportional_sample(D: FiniteDistribution) -> LabeledSample:
    """A sample whose multiplicities are exactly proportional to ``D``."""
    probs = [Fraction(p) for _, _, p in D.support]
    denom = 1
    for p in probs:
        denom = math.lcm(denom, p.denominator)
    items = []
    for (x, y, _), p in zip(D.support, probs):
        items.extend([(x, y)] * int(p * denom))
    return LabeledSample(tuple(items))


ACCEPTANCE_LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
