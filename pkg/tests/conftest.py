import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from branchsolve.mv_core import Grid

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def grid23():
    return Grid(q=2, k=3, n_rhat=17, n_theta_hat=48, n_y=(8,))


@pytest.fixture
def grid34():
    return Grid(q=3, k=4, n_rhat=17, n_theta_hat=48, n_y=(8,))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
