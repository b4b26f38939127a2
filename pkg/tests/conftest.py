import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record named checks; the terminal summary prints one line per criterion."""

    class Recorder:
        def __init__(self):
            self.checks = []

        def check(self, label, ok, detail=""):
            self.checks.append((label, bool(ok), detail))
            return ok

        def finish(self, name):
            ok = all(c[1] for c in self.checks)
            detail = "; ".join(f"{l}: {'ok' if o else 'FAIL'} ({d})" for l, o, d in self.checks)
            _ACCEPTANCE.append((name, ok, detail))
            failed = [c for c in self.checks if not c[1]]
            assert not failed, "; ".join(f"{l} ({d})" for l, _, d in failed)

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name} :: {detail}")
