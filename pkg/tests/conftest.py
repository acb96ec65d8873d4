import acceptance_runs


def pytest_terminal_summary(terminalreporter):
    if acceptance_runs.SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_runs.SUMMARY, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
