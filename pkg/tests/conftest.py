import pytest
from gmpy2 import mpq

from kzbperiod.curve import Chart, CurveParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def c10():
    return CurveParams(1, 0)


@pytest.fixture(scope="session")
def c01():
    return CurveParams(0, 1)


@pytest.fixture(scope="session")
def cgen():
    return CurveParams(mpq(2, 3), mpq(-5, 7))


@pytest.fixture(scope="session")
def pt44(c10):
    return Chart.point(c10, 4, 4)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
