from __future__ import annotations

import pytest

from quadlucas.field import parse_element

# Fixed corpus: real and imaginary fields, a non-integral element of absolute
# value 1, rationals, and two elements whose beta is torsion.
CORPUS_LITERALS = (
    "1+1*sqrt(2)",
    "(1,-1,-1)+",  # golden ratio
    "1+1*sqrt(3)",
    "3+1*sqrt(7)",
    "1+1*sqrt(-2)",
    "(1,-1,2)+",  # (1+sqrt(-7))/2
    "(2,-3,2)+",  # (3+sqrt(-7))/4, |gamma| = 1
    "1/3+1/3*sqrt(2)",
    "2",
    "3/2",
    "1+1*sqrt(-1)",  # beta = -i
    "1*sqrt(2)",  # beta = -1
)

CORPUS = tuple(parse_element(s) for s in CORPUS_LITERALS)
QUADRATIC = tuple(g for g in CORPUS if g.degree == 2)


@pytest.fixture(params=CORPUS_LITERALS)
def gamma(request):
    return parse_element(request.param)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running grid checks")
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


# acceptance criteria: one PASS/FAIL line each in the terminal summary
_criteria: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number, title = marker.args
    status = "PASS" if report.passed else "FAIL"
    _criteria[number] = (title, status, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, duration = _criteria[number]
        terminalreporter.write_line(f"{status} criterion {number:>2}: {title} ({duration:.1f}s)")
