import pytest

from optodistill.dynamics import ProtocolParams


@pytest.fixture
def fig2():
    return ProtocolParams.fig2()


@pytest.fixture
def fig3():
    return ProtocolParams.fig3()


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
