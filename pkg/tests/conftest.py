"""Shared pytest wiring.

The acceptance tests record one line per criterion; printing them from a
pytest_terminal_summary hook keeps the lines visible under default output
capture, whether or not the underlying assert passed.
"""

import pytest

_CRITERION_LINES = []


def record_criterion(number, passed, detail):
    tag = "PASS" if passed else "FAIL"
    _CRITERION_LINES.append(f"[{tag}] criterion {number}: {detail}")


@pytest.fixture(scope="session")
def criterion_log():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_CRITERION_LINES):
        terminalreporter.write_line(line)
