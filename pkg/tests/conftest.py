from __future__ import annotations

import re

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _outcomes.setdefault(int(m.group(1)), []).append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        parts = _outcomes[n]
        ok = all(outcome == "passed" for _, outcome in parts)
        failed = [name for name, outcome in parts if outcome != "passed"]
        detail = f"{len(parts) - len(failed)}/{len(parts)} passed"
        if failed:
            detail += f"; failed: {', '.join(failed)}"
        terminalreporter.write_line(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  ({detail})")
