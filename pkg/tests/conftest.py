import pytest

from qshutter.barrier import BarrierParams, find_poles
from qshutter.units import free_passage_time, wavenumber_from_energy

V0, D, M_RATIO, E0 = 0.3, 4.0, 0.067, 0.01


@pytest.fixture(scope="session")
def params():
    return BarrierParams(V0, D, M_RATIO)


@pytest.fixture(scope="session")
def k0():
    return wavenumber_from_energy(E0, M_RATIO)


@pytest.fixture(scope="session")
def t_f(k0):
    return free_passage_time(D, k0, M_RATIO)


@pytest.fixture(scope="session")
def table(params):
    return find_poles(params, 1000)


@pytest.fixture(scope="session")
def small_table(params):
    return find_poles(params, 50)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
