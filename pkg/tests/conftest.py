import numpy as np
import pytest

from uhardy.unitary import RandomStream

_CRITERIA: list[str] = []


def record_criterion(line: str) -> None:
    print(line)
    _CRITERIA.append(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def gen():
    return np.random.default_rng(20240611)


@pytest.fixture
def rs():
    return RandomStream(1234, 7)
