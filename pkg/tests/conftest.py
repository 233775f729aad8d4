import contextlib
import time

import pytest

from silentduel import FiringStrategy, GameParams, solve_equilibrium

_CRITERIA: dict[int, tuple[str, str, float]] = {}


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion's outcome and runtime."""

    @contextlib.contextmanager
    def record(number: int, title: str):
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - start
            if number in _CRITERIA:
                prev_status, _, prev_elapsed = _CRITERIA[number]
                status = "FAIL" if "FAIL" in (status, prev_status) else status
                elapsed += prev_elapsed
            _CRITERIA[number] = (status, title, elapsed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title, elapsed = _CRITERIA[number]
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title} ({elapsed:.2f} s)")


def strategy_for(n, c):
    return FiringStrategy(solve_equilibrium(GameParams(n, c)))


GRID_N = (2, 3, 4, 6, 10)


def grid_c(n):
    return (0.0, 0.1, 1.0 / n, 0.5, 0.9)


FULL_GRID = [(n, c) for n in GRID_N for c in grid_c(n)]
