import time

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Times one acceptance criterion and records a pass/fail line for it."""
    number, title, limit = request.node.get_closest_marker("criterion").args
    start = time.perf_counter()
    yield limit
    elapsed = time.perf_counter() - start
    failed = getattr(request.node, "call_failed", False) or elapsed >= limit
    line = f"criterion {number} [{title}]: {'FAIL' if failed else 'PASS'} ({elapsed:.2f}s, limit {limit}s)"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)
    assert elapsed < limit, f"criterion {number} took {elapsed:.2f}s, limit {limit}s"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.call_failed = rep.failed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion with a time limit")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
