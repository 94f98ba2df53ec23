import pytest

from willmorekit.manifold import builtin
from willmorekit.willmore import prepare


@pytest.fixture(scope="session")
def schwarzschild2():
    return builtin("schwarzschild", mass=2.0)


@pytest.fixture(scope="session")
def schwarzschild2_ctx(schwarzschild2):
    return prepare(schwarzschild2)


@pytest.fixture(scope="session")
def rn31():
    return builtin("reissner-nordstrom", mass=3.0, charge=1.0)


@pytest.fixture(scope="session")
def rn31_ctx(rn31):
    return prepare(rn31)


@pytest.fixture(scope="session")
def unit_cone():
    return builtin("cone", slope=1.0, offset=1.0)


@pytest.fixture(scope="session")
def half_cone():
    return builtin("cone", slope=0.5, offset=1.0)


@pytest.fixture(scope="session")
def modified_ctx():
    return prepare(builtin("modified-schwarzschild"))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
