import pytest

from zswarm.sim import SimConfig
from zswarm.world import WorldBounds

GRID3 = WorldBounds(0, 2, 0, 2, 0, 0)
GRID2 = WorldBounds(0, 1, 0, 1, 0, 0)


@pytest.fixture
def formation_config():
    return SimConfig(p=4, q=3, num_robots=12, rng_seed=42, max_ticks=100_000)


@pytest.fixture
def tiny_config():
    return SimConfig(p=1, q=2, num_robots=2, rng_seed=0, max_ticks=1000, bounds=GRID3)


ACCEPTANCE_RESULTS: list[str] = []


@pytest.fixture
def criterion(request):
    """Time a criterion body and log one PASS/FAIL line for the summary.

    Usage: ``with criterion(n, title, limit_seconds): ...``
    """
    import contextlib
    import time

    @contextlib.contextmanager
    def _run(number, title, limit):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            verdict = "PASS" if ok else "FAIL"
            line = f"{verdict} criterion {number}: {title} ({elapsed:.2f}s / {limit}s)"
            ACCEPTANCE_RESULTS.append(line)
            print(line)

    return _run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
