from __future__ import annotations

import pytest

from argbound.verifier import scan_zeros

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def scan5000():
    """One zero scan to height 5000, shared by the verifier, CLI and acceptance tests."""
    return scan_zeros(5000.0)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
