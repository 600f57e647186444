import numpy as np
import pytest

from ptkr_otoc import SimParams
from ptkr_otoc.otoc import echo, prepare

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ref_params():
    return SimParams()


@pytest.fixture(scope="session")
def ref_setup(ref_params):
    return prepare(ref_params)


@pytest.fixture(scope="session")
def ref_echo(ref_setup):
    """Echo of the initial Gaussian through t_10 at the default operating point."""
    return echo(ref_setup.initial, ref_setup, 10, snapshot_at=(0, 5, 10))
