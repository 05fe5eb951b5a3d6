import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def decaying_coeffs(rng, degree, rate=0.7):
    """Random Chebyshev coefficients with geometric decay (typical of smooth proxies)."""
    return rng.standard_normal(degree + 1) * rate ** np.arange(degree + 1)


# one line per acceptance criterion, shown after the run even when output is captured
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
