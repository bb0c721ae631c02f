import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polydisc import CPoint, Polydisc  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def unit_bidisc():
    return Polydisc(CPoint((0j, 0j)), (1.0, 1.0))


@pytest.fixture
def unit_disc():
    return Polydisc(CPoint((0j,)), (1.0,))



def pytest_terminal_summary(terminalreporter):
    # acceptance lines are printed under capture; repeat them here
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
