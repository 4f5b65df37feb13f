from __future__ import annotations

import pytest

from hedonica import cycle_gadget, make_game
from hedonica.io import fixture

# Families instantiated on the pentagon / 9-gon in the emptiness checks.
CYCLE_FAMILIES = ("wgame", "wbgame", "as", "hcnet", "fhg", "socialfhg", "median")


@pytest.fixture(scope="session")
def phi0():
    return fixture("phi0")


@pytest.fixture(scope="session")
def phi6():
    return fixture("phi6")


@pytest.fixture(scope="session")
def pentagon():
    return cycle_gadget(5)


@pytest.fixture(scope="session")
def ninegon():
    return cycle_gadget(9)


def game_on(profile, family, **params):
    return make_game(profile, family, params or None)


# Acceptance verdicts, one line per criterion, echoed in the terminal summary.
VERDICTS: dict = {}


def record(criterion: int, ok: bool, detail: str) -> str:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}"
    VERDICTS[criterion] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[k])
