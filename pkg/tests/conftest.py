import pytest

# criterion number -> (passed, summary); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(n: int, clauses: dict[str, bool]) -> None:
        failed = [k for k, ok in clauses.items() if not ok]
        ACCEPTANCE[n] = (not failed, "; ".join(f"{k}: {'ok' if ok else 'FAILED'}" for k, ok in clauses.items()))
        assert not failed, f"criterion {n}: failed clauses {failed}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
