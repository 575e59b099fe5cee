import pytest

# criterion id -> (passed, one-line detail); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def acceptance_record():
    def record(cid: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[cid] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    def key(cid):
        head = cid.split(".")[0].lstrip("C")
        return (int(head), cid)
    for cid in sorted(ACCEPTANCE_RESULTS, key=key):
        passed, detail = ACCEPTANCE_RESULTS[cid]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{cid}] {status} {detail}")
