import numpy as np
import pytest

from lpplab import derive_trial_field


@pytest.fixture
def field():
    return derive_trial_field(7, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
