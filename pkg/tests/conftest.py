import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stringalg.cli import EXAMPLES, example_text  # noqa: E402
from stringalg.freealg import load_presentation  # noqa: E402
from stringalg.quotient import build  # noqa: E402

_results: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    failed_setup = rep.when == "setup" and not rep.passed
    if rep.when == "call" or failed_setup:
        _results.setdefault(n, []).append(rep.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        runs = _results[n]
        status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status} ({sum(runs)}/{len(runs)} tests)")


_cache: dict = {}


def fixture_presentation(name: str, precision=None):
    pres = load_presentation(example_text(name), name=name)
    return pres if precision is None else pres.with_precision(precision)


def fixture_algebra(name: str, precision=None):
    key = (name, precision)
    if key not in _cache:
        _cache[key] = build(fixture_presentation(name, precision))
    return _cache[key]


@pytest.fixture(params=EXAMPLES)
def example_name(request):
    return request.param
