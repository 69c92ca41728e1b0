import pytest

_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one pass/fail line for the acceptance summary."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"{label}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
