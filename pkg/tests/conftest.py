"""Shared pytest wiring for the suite.

The acceptance tests record one verdict line per numbered criterion;
echoing them in the terminal summary keeps them visible in a plain
`pytest` run, where captured stdout of passing tests is discarded.
"""

acceptance_lines: list[str] = []


def record_acceptance_line(line: str) -> None:
    acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.line(line)
