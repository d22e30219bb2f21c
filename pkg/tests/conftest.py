import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, str] = {}


@contextmanager
def _criterion(number: int, title: str, limit: float):
    start = time.perf_counter()
    status, detail = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if elapsed >= limit:
            detail = f"over the {limit:g}s limit"
            raise AssertionError(f"criterion {number} took {elapsed:.2f}s, limit {limit:g}s")
        status = "PASS"
    except BaseException as exc:
        detail = detail or type(exc).__name__
        raise
    finally:
        elapsed = time.perf_counter() - start
        line = f"[{status}] {number:2d}. {title} ({elapsed:.2f}s / {limit:g}s)"
        _RESULTS[number] = line + (f" {detail}" if detail else "")
        print(_RESULTS[number])


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_RESULTS):
            terminalreporter.write_line(_RESULTS[n])
