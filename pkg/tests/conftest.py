import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_symmetric(rng, d):
    a = rng.normal(size=(d, d))
    return a + a.T


def random_antisymmetric(rng, d):
    a = rng.normal(size=(d, d))
    return a - a.T


ACCEPTANCE_LINES = {}


def record_criterion(number, title, passed, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
