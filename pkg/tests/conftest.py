import re

import pytest

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion.

    The criterion number comes from the test name (``test_criterion_07_...``).
    A test that raises before recording is reported as a failure.
    """
    number = int(re.search(r"criterion_(\d+)", request.node.name).group(1))

    def record(title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        _LINES[number] = line
        print(line)
        return ok

    yield record
    if number not in _LINES:
        _LINES[number] = f"criterion {number:>2}: FAIL  raised before reporting"


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_LINES):
            terminalreporter.write_line(_LINES[n])
