import numpy as np
import pytest

from tandem_aoi import CouplingModel, GammaCompute, SystemParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ref_coupling():
    return CouplingModel(B0=10.0, alpha=1.0)


@pytest.fixture
def base_point():
    """lam=1, T_o=3, tau=1, k=0.1, E[P]=1 with B0=10, alpha=1."""
    return SystemParams(lam=1.0, T_o=3.0, tau=1.0), GammaCompute(1.0, 0.1), CouplingModel(10.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
