import numpy as np
import pytest

from leaky_unconfined.params import DimensionlessGroups

# parameter set shared by the figure scenarios
FIGURE = DimensionlessGroups(K_D=1.0, S_D=1e3, a_kD=10.0, a_cD=10.0, d_D=0.0, l_D=0.6,
                             r_w_over_b=0.02, C_wD=1e2, R_Kr=1e-2, R_Kz=1e-2, R_Ss=1e-2)


@pytest.fixture
def figure_groups():
    return FIGURE


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel_err(a, b):
    return abs(a - b) / abs(b)


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def record(number, title, passed, detail):
        _VERDICTS.append((number, f"{'PASS' if passed else 'FAIL'} [{number}] {title}: {detail}"))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
