from functools import lru_cache

import pytest

from spectral_dumbbell.experiments import run_dumbbell_convergence
from spectral_dumbbell.mesh import gen_icosphere

ACCEPTANCE_LINES: dict = {}


@lru_cache(maxsize=None)
def icosphere(level: int, radius: float = 1.0):
    return gen_icosphere(level, radius)


@pytest.fixture(scope="session")
def dumbbell_table():
    return run_dumbbell_convergence(0.5, [0.3, 0.15, 0.075], level=4, m=8)


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
