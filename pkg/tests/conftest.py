import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from approxmin import SamplePlan

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def plan():
    return SamplePlan()


@pytest.fixture(scope="session")
def acceptance_log():
    def log(criterion, passed, detail=""):
        mark = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[criterion {criterion}] {mark} {detail}".rstrip())

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
