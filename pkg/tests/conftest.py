import pytest

from dilators.orders import Nat, Omega, RevOmega, build_order
from dilators.zoo import BUILTIN_THREADS, make_DL, make_E, two_power


@pytest.fixture
def omega():
    return Omega()


@pytest.fixture
def rev_omega():
    return RevOmega()


@pytest.fixture
def T():
    return two_power()


@pytest.fixture
def E():
    return make_E()


@pytest.fixture(params=sorted(BUILTIN_THREADS))
def thread(request):
    return BUILTIN_THREADS[request.param]


@pytest.fixture
def dl_omega():
    return make_DL(BUILTIN_THREADS["omega"])


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance._LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance._LINES:
            terminalreporter.write_line(line)
