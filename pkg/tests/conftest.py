import sys

import pytest

from kappabar import parse_database

PENGUIN = """\
atoms: b p f
d1: b -> f
d2: p -> !f
d3: p -> b
"""

WINGED = PENGUIN.replace("atoms: b p f", "atoms: b p f w") + "d4: b -> w\n"

# penguin plus a strength-1 unconditional default on w
CREATURES = PENGUIN.replace("atoms: b p f", "atoms: b p f w") + "d4: true -> w [1]\n"

LEGS = """\
atoms: b f l
d1: b -> f
d2: b -> l
"""


@pytest.fixture
def penguin():
    return parse_database(PENGUIN)


@pytest.fixture
def winged():
    return parse_database(WINGED)


@pytest.fixture
def creatures():
    return parse_database(CREATURES)


@pytest.fixture
def legs():
    return parse_database(LEGS)


@pytest.fixture
def empty():
    return parse_database("atoms: b p f\n")


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.report_lines():
        terminalreporter.write_line(line)
