import pathlib

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

DATA = pathlib.Path(__file__).parent / "data"

# filled by tests/test_acceptance.py, echoed in the terminal summary
CRITERIA: dict = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(f"criterion {n}: {CRITERIA[n]}")
