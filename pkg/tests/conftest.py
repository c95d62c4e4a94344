"""Shared pytest wiring: replay the acceptance-criterion status lines.

The acceptance tests record one ``criterion NN [PASS|FAIL]`` line each; those
lines are replayed after the run, outside output capture, so every invocation
ends with one visible status line per criterion.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
