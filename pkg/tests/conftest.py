import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = {}


class Recorder:
    """Collects one outcome line per acceptance criterion."""

    def __init__(self, store):
        self.store = store

    def __call__(self, number, title):
        return _Criterion(self.store, number, title)


class _Criterion:
    def __init__(self, store, number, title):
        self.store, self.number, self.title = store, number, title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        note = self.detail if ok else f"{exc_type.__name__}: {exc}".splitlines()[0]
        self.store[self.number] = (ok, self.title, note)
        return False


@pytest.fixture
def criterion():
    return Recorder(_ACCEPTANCE)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, title, note = _ACCEPTANCE[number]
        line = f"{'PASS' if ok else 'FAIL'} {number}. {title}"
        terminalreporter.write_line(line + (f" ({note})" if note else ""))
