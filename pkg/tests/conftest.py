from __future__ import annotations

import pytest

from fds3.models import make_model

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter) -> None:
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def product():
    return make_model("product")


@pytest.fixture(scope="session")
def rotation():
    return make_model("rotation", k=3)
