from __future__ import annotations

import pytest

from bossmerge import StringCollection, build_boss

SAMPLE = ("TACACT", "TACTCG", "GACTCA")


def dna(*strings: str) -> StringCollection:
    return StringCollection.of(strings)


@pytest.fixture
def sample_graph():
    return build_boss(dna(*SAMPLE), 3)


@pytest.fixture
def ac_graph():
    return build_boss(dna("AC"), 2)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
