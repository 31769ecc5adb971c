import numpy as np
import pytest

from equiaffine.surface import catalog

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def product_parabolas():
    return catalog("product-parabolas")


@pytest.fixture(scope="session")
def paraboloid_uv():
    return catalog("paraboloid-graph", g="u*v")


@pytest.fixture
def report_acceptance():
    """Collect one line per acceptance criterion for the end-of-run table."""
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
