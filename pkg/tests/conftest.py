from fractions import Fraction

import numpy as np
import pytest

from ldpguard import caseio
from ldpguard.regress import fixture_path

# Exact lower end of case1's feasible interval for x1 (row 2 is the binding row).
CASE1_BOUND = Fraction(10123.19482867013) / Fraction(74.79768991470337)

KNOWN_BAD = {
    "case1": np.array([-0.375, 0.0]),
    "case2": np.array([0.607421875, 0.0]),
    "case3": np.array([0.45703125, 0.0]),
}

_criteria: list[tuple[str, bool, str]] = []


def load_fixture(name):
    return caseio.load(fixture_path(name)).problem


@pytest.fixture(scope="session")
def case1():
    return load_fixture("case1")


@pytest.fixture(scope="session")
def case2():
    return load_fixture("case2")


@pytest.fixture(scope="session")
def case3():
    return load_fixture("case3")


@pytest.fixture
def criterion():
    """Record one acceptance verdict; printed in the terminal summary."""

    def record(name, passed, detail=""):
        _criteria.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
