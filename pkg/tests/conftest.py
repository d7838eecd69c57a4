import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one ``criterion N: PASS/FAIL ...`` line for the terminal summary."""
    def record(number, ok, detail):
        _VERDICTS.append((number, f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
