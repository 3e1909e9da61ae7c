import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hawkes_edgeworth import Theta, simulate  # noqa: E402

REF_THETA = Theta(0.5, 1.0, 1.3)


@pytest.fixture
def theta0():
    return REF_THETA


@pytest.fixture(scope="session")
def ref_paths():
    """Twenty simulated paths at the reference parameters, T = 30."""
    return [simulate(REF_THETA, 30.0, seed) for seed in range(20)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line for an acceptance criterion and assert it."""

    def _report(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} [{number:>2}] {text}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
