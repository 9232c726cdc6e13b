import time
from contextlib import contextmanager
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_ACCEPTANCE: dict = {}


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def acceptance():
    """Record one line per acceptance criterion for the end-of-run summary."""

    def record(number: int, title: str, passed: bool, elapsed: float, budget: float, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number:>2} {status}  {title}  ({elapsed:.2f}s / {budget:g}s){'  ' + detail if detail else ''}"
        _ACCEPTANCE[number] = line
        print(line)

    return record


class Checks:
    def __init__(self):
        self.failed = []

    def check(self, label: str, ok: bool):
        if not ok:
            self.failed.append(label)
        return ok


@pytest.fixture
def criterion(acceptance):
    """Run a block as one criterion: every check must hold and the time budget must be met."""

    @contextmanager
    def run(number: int, title: str, budget: float):
        checks = Checks()
        start = time.perf_counter()
        crashed = None
        try:
            yield checks
        except Exception as exc:
            crashed = exc
            raise
        finally:
            elapsed = time.perf_counter() - start
            detail = ""
            if crashed is not None:
                detail = f"error: {crashed!r}"[:200]
            elif checks.failed:
                detail = "failed: " + ", ".join(checks.failed[:5])
            elif elapsed >= budget:
                detail = "over time budget"
            ok = crashed is None and not checks.failed and elapsed < budget
            acceptance(number, title, ok, elapsed, budget, detail)
            if crashed is None:
                assert not checks.failed, checks.failed
                assert elapsed < budget, f"{elapsed:.1f}s over the {budget}s budget"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])
