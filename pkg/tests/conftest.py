import pytest

from capmon.simulator import ScenarioConfig, generate_window

C0 = 2.2e-3
ESR0 = 40e-3


@pytest.fixture(scope="session")
def table1_cfg():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def table1_window(table1_cfg):
    window, truth = generate_window(table1_cfg)
    return window, truth


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
