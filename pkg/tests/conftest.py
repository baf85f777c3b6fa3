"""Shared pytest plumbing: the acceptance-criteria summary block.

test_acceptance.py records one entry per criterion through
`record_criterion`; the terminal summary prints them as PASS/FAIL lines
at the end of the run so the gate is readable at a glance.
"""

_CRITERION_RESULTS = []


def record_criterion(label: str, passed: bool, detail: str = "") -> None:
    _CRITERION_RESULTS.append((label, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _CRITERION_RESULTS:
        status = "PASS" if passed else "FAIL"
        suffix = f" -- {detail}" if detail else ""
        terminalreporter.write_line(f"[{status}] {label}{suffix}")
