from __future__ import annotations

import pytest

CRITERIA = {
    1: "exact partial binomial sums and entropy bracket",
    2: "identify/find against every responder",
    3: "continuous search measure is exact",
    4: "cyclic minimum rank bound",
    5: "search adversary witness rank floor",
    6: "time-series search at M/m=100, k=4, H=1",
    7: "doubling baseline ratio",
    8: "bidding with advice below upper bound",
    9: "bidding bounds bracket the measured ratio",
    10: "knapsack on adversarial families",
    11: "robust variants under unbounded error",
    12: "resource augmentation beats perfect advice",
    13: "byte-identical reruns of shipped configs",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes.setdefault(marker.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        status = "NOT RUN" if results is None else ("PASS" if all(results) else "FAIL")
        terminalreporter.write_line(f"criterion {n:2d}: {status:7s} {title}")
