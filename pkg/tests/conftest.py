import numpy as np
import pytest

from crapperwaves.crapper import crapper_interface, crapper_sheet_strength, crapper_theta_tau


@pytest.fixture(scope="session")
def crapper_cache():
    """Crapper data keyed by (A, N), computed once per session."""
    cache = {}

    def get(A, N=256):
        if (A, N) not in cache:
            theta, tau = crapper_theta_tau(A, N)
            curve = crapper_interface(A, N)
            w = crapper_sheet_strength(A, N, curve)
            cache[A, N] = (theta, tau, curve, w)
        return cache[A, N]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def add(number, name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
