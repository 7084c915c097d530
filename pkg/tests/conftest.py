from __future__ import annotations

import pytest

from bundlesym.harness.gen import Gen, GenConfig
from bundlesym.matalg import MatPoly
from bundlesym.poly import Poly, parse_poly

_ACCEPTANCE_LINES: list[str] = []


def P(text: str, m: int = 2) -> Poly:
    return parse_poly(text, m)


def M(rows, m: int = 2) -> MatPoly:
    """Matrix from nested lists of polynomial strings or numbers."""
    return MatPoly([[parse_poly(str(e), m) for e in row] for row in rows])


@pytest.fixture
def gen():
    return Gen(GenConfig(seed=7), seed=7)


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
