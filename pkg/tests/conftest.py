from fractions import Fraction

import pytest
from hypothesis import strategies as st

from ptqao.weyl import GaussianRational, WeylOperator

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.append((marker.args[0], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _ACCEPTANCE:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")


small_rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def gaussian_rationals(draw):
    return GaussianRational(draw(small_rationals), draw(small_rationals))


@st.composite
def operators(draw, max_power=3, max_terms=4, lam_range=(-1, 2)):
    n = draw(st.integers(0, max_terms))
    terms = []
    for _ in range(n):
        key = (
            draw(st.integers(0, max_power)),
            draw(st.integers(0, max_power)),
            draw(st.integers(*lam_range)),
        )
        terms.append((key, draw(gaussian_rationals())))
    return WeylOperator(terms)


@pytest.fixture
def unit_params():
    from ptqao.metric import ProblemParams

    return ProblemParams(1, 1, 1)


@pytest.fixture
def odd_params():
    from ptqao.metric import ProblemParams

    return ProblemParams(Fraction(3, 2), Fraction(-2, 5), Fraction(7, 3))
