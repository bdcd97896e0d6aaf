import pytest

_VERDICTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_VERDICTS] = {}


@pytest.fixture
def verdict(request):
    """Record one acceptance line: ``verdict(number, ok, detail)``."""
    store = request.config.stash[_VERDICTS]

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        store[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_VERDICTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        terminalreporter.write_line(store[number])
