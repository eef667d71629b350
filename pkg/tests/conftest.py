import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dfs_herald import logical_basis  # noqa: E402


@pytest.fixture(scope="session")
def basis():
    return logical_basis()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA = []


def record_criterion(line: str):
    _CRITERIA.append(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
