import pytest

_RESULTS = {}


@pytest.fixture
def acceptance():
    """Record one criterion outcome and assert it."""
    def record(label: str, passed: bool, detail: str):
        _RESULTS[label] = (bool(passed), detail)
        assert passed, f"criterion {label}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    key = lambda s: (int("".join(c for c in s if c.isdigit())), s)
    for label in sorted(_RESULTS, key=key):
        passed, detail = _RESULTS[label]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {label}: {detail}")
