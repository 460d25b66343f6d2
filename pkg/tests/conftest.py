"""Shared pytest configuration: deterministic hypothesis runs, serial studies."""

import os

import hypothesis

hypothesis.settings.register_profile(
    "suite", derandomize=True, deadline=None, max_examples=60)
hypothesis.settings.load_profile("suite")

# rate studies inside tests stay serial: reproducible and 1-CPU friendly
os.environ.setdefault("EULERALPHA_WORKERS", "1")

# one line per acceptance criterion, echoed after the run so the scoreboard
# survives output capture (test_acceptance appends here)
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
