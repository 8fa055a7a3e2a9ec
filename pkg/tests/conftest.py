from functools import lru_cache

import pytest

from rabipolaron.exact_diag import solve_exact
from rabipolaron.model import from_ratio
from rabipolaron.variational import minimize_ground


@lru_cache(maxsize=None)
def cached_model(ratio, g_over_gc):
    return from_ratio(ratio, g_over_gc)


@lru_cache(maxsize=None)
def cached_solution(ratio, g_over_gc, ansatz="full4"):
    return minimize_ground(cached_model(ratio, g_over_gc), ansatz, compute_error=False)


@lru_cache(maxsize=None)
def cached_exact(ratio, g_over_gc):
    return solve_exact(cached_model(ratio, g_over_gc))


@pytest.fixture
def solve():
    return cached_solution


@pytest.fixture
def exact():
    return cached_exact


ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail, elapsed):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'} ({elapsed:.1f} s) {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
