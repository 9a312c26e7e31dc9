import pytest

from birkhoff.domain import Disc, Ellipse, FourierDomain, build_chart
from birkhoff.lazutkin import build_lazutkin


def _pair(spec):
    chart = build_chart(spec)
    return chart, build_lazutkin(chart)


@pytest.fixture(scope="session")
def disc1():
    return _pair(Disc(1.0))


@pytest.fixture(scope="session")
def ellipse12():
    return _pair(Ellipse(1.0, 1.2))


@pytest.fixture(scope="session")
def ellipse13():
    return _pair(Ellipse(1.0, 1.3))


@pytest.fixture(scope="session")
def fourier_a2():
    return _pair(FourierDomain(1.0, ((2, 0.05, 0.0),)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number].line())
    passed = sum(c.passed for c in RESULTS.values())
    terminalreporter.write_line(f"{passed}/{len(RESULTS)} criteria passed")
