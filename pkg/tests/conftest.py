import math

import pytest

from wsnsim.model import FieldGeometry, Position, RadioParams, SensorNode, SimConfig

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def radio():
    return RadioParams()


@pytest.fixture
def defaults():
    return SimConfig()


def make_node(i, x, y, energy=2.0, **kw):
    return SensorNode(id=i, position=Position(x, y), residual_energy=energy, **kw)


def field_with_bs(x, y, length=100.0, width=100.0):
    return FieldGeometry(yard_length=length, yard_width=width, bs_position=Position(x, y))


def rel_close(a, b, rel):
    return math.isclose(a, b, rel_tol=rel, abs_tol=0.0)
