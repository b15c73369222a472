from __future__ import annotations

from pathlib import Path

import pytest

from hdec.dsl import parse_problem

PROBLEMS = Path(__file__).resolve().parents[1] / "examples" / "problems"

# Acceptance tests append their one-line verdicts here; printed at the end.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def problem_path():
    return lambda name: PROBLEMS / name


@pytest.fixture
def load():
    return lambda name: parse_problem((PROBLEMS / name).read_text())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
