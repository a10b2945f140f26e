import pytest

from flexreflect.geometry import Point, ReflectorDims, TargetArea
from flexreflect.link_budget import LinkBudgetConfig, dbm_to_watts, wavelength_from_frequency

CARRIER_HZ = 2.4e9
WAVELENGTH = wavelength_from_frequency(CARRIER_HZ)

_ACCEPTANCE_LINES = []


@pytest.fixture
def tx():
    return Point(0.0, -50.0)


@pytest.fixture
def rx():
    return Point(100.0, -150.0)


@pytest.fixture
def dims():
    return ReflectorDims.from_wavelengths(10.0, 5.0, WAVELENGTH)


@pytest.fixture
def area():
    return TargetArea(Point(100.0, -150.0), 100.0, 50.0)


@pytest.fixture
def link(dims, tx):
    return LinkBudgetConfig(dbm_to_watts(30.0), dims, tx)


@pytest.fixture
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion for the summary."""
    def report(number: int, ok: bool, detail: str, seconds: float, limit: float) -> None:
        status = "PASS" if ok else "FAIL"
        line = f"{status} criterion {number}: {detail} [{seconds:.2f} s, limit {limit:g} s]"
        _ACCEPTANCE_LINES.append(line)
        print(line)
    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
