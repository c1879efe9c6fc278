"""Shared pytest plumbing: collect acceptance verdicts for the summary."""

VERDICT_LINES = []


def record_verdict(line: str):
    VERDICT_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if VERDICT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in VERDICT_LINES:
            terminalreporter.write_line(line)
