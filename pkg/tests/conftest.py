import pytest

_ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(cid, title, ok, measured)."""
    def record(cid: int, title: str, ok: bool, measured: str):
        _ACCEPTANCE[cid] = (title, bool(ok), measured)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {cid:2d} {title}: {measured}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE):
        title, ok, measured = _ACCEPTANCE[cid]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {cid:2d} {title}: {measured}")
