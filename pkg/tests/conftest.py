"""Suite-wide step auditing and the acceptance summary.

Every composition step produced anywhere in the test run goes through an
audited wrapper that re-checks exact budget conservation and the tie rule,
so a violation fails the test that produced it. The terminal summary
prints one line per acceptance criterion at the end of the run.
"""

from __future__ import annotations

import re
from fractions import Fraction

import bidsched.runtime as runtime

AUDIT = {"steps": 0, "violations": 0}

_criterion_details: dict[int, str] = {}
_criterion_results: dict[int, str] = {}

_real_compose_step = runtime.compose_step


def register_criterion(number: int, detail: str) -> None:
    """Record the detail line an acceptance test wants in the summary."""
    _criterion_details[number] = detail


def _audited_compose_step(graph, tender_1, tender_2, history):
    record = _real_compose_step(graph, tender_1, tender_2, history)
    before, after = record.config_before, record.config_after
    ok = all(
        isinstance(x, Fraction)
        for x in (record.bid_1, record.bid_2, before.budget_1, after.budget_1)
    )
    ok = ok and record.winner == (1 if record.bid_1 >= record.bid_2 else 2)
    if record.winner == 1:
        expected = before.budget_1 - record.bid_1
    else:
        expected = before.budget_1 + record.bid_2
    ok = ok and after.budget_1 == expected and 0 <= after.budget_1 <= 1
    AUDIT["steps"] += 1
    if not ok:
        AUDIT["violations"] += 1
        raise AssertionError(f"trace step failed the exactness audit: {record}")
    return record


runtime.compose_step = _audited_compose_step


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if match:
        _criterion_results[int(match.group(1))] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criterion_results):
        status = "PASS" if _criterion_results[number] == "passed" else "FAIL"
        line = f"criterion {number}: {status}"
        detail = _criterion_details.get(number)
        if detail and status == "PASS":
            line += f" ({detail})"
        terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"trace audit: {AUDIT['steps']} steps checked, {AUDIT['violations']} violations"
    )
