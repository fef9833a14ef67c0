"""Shared pytest plumbing: the acceptance summary block.

test_acceptance records one (number, passed, detail) entry per criterion;
this hook prints them after the terminal summary so a plain `pytest -v`
run ends with one PASS/FAIL line per acceptance criterion.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "ACCEPTANCE_LOG", None):
        return
    tw = terminalreporter
    tw.section("acceptance criteria")
    for num, passed, detail in sorted(mod.ACCEPTANCE_LOG):
        tw.write_line(f"ACCEPTANCE {num}: {'PASS' if passed else 'FAIL'} - {detail}")
