from __future__ import annotations

import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(num, label): acceptance check that gets a one-line summary",
    )
    config._criterion_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    # setup-phase failures (broken fixtures) and skips must still show up
    if report.when == "setup" and report.outcome == "passed":
        return
    if report.when == "teardown":
        return
    num = int(marker.args[0])
    label = marker.args[1] if len(marker.args) > 1 else item.name
    item.config._criterion_results[num] = (label, report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criterion_results", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    words = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    for num in sorted(results):
        label, outcome = results[num]
        word = words.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {num:2d} {word}  {label}")
