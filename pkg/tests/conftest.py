"""Shared pytest configuration.

Acceptance tests carry ``@pytest.mark.criterion(n)``; after the run one
PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number this test checks")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = int(marker.args[0])
    if call.when == "setup" and call.excinfo is not None:
        _RESULTS.setdefault(n, []).append(False)
    elif call.when == "call":
        _RESULTS.setdefault(n, []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        ok = all(_RESULTS[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}")


@pytest.fixture
def nba():
    from clockdistill.profiles import NBA
    return NBA


@pytest.fixture
def soccer():
    from clockdistill.profiles import SOCCER
    return SOCCER
