import functools

import pytest
from hypothesis import HealthCheck, settings

from ampcap.solver import SolverConfig, solve_capacity

settings.register_profile(
    "ampcap", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ampcap")


@functools.lru_cache(maxsize=None)
def solved(A):
    """Cold KKT-certified solve, shared across the whole session."""
    return solve_capacity(SolverConfig(A=float(A)))


@pytest.fixture(scope="session")
def solve():
    return solved


_CRITERIA_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; printed again in the terminal summary."""
    lines = request.config.stash.setdefault(_CRITERIA_KEY, [])

    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
