import os
from pathlib import Path

import mpmath
import pytest


@pytest.fixture(autouse=True)
def _restore_precision():
    dps = mpmath.mp.dps
    yield
    mpmath.mp.dps = dps


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory) -> Path:
    """Weak-series cache shared by the whole session.

    CUBICSUM_TEST_CACHE points it at a persistent directory so repeated runs reuse
    the exact coefficients.
    """
    env = os.environ.get("CUBICSUM_TEST_CACHE")
    if env:
        path = Path(env)
        path.mkdir(parents=True, exist_ok=True)
        return path
    return tmp_path_factory.mktemp("weak-cache")


# -- acceptance report: one line per criterion ------------------------------

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    failed = [line for line in getattr(item, "criterion_checks", []) if not line[1]]
    _CRITERIA.setdefault(marker.args[0], []).append((item.name, report.passed, failed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        tests = _CRITERIA[n]
        ok = all(passed for _, passed, _ in tests)
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}"
        if not ok:
            misses = [name for _, _, failed in tests for name, _, _ in failed]
            misses = misses or [name for name, passed, _ in tests if not passed]
            line += "  (" + ", ".join(misses) + ")"
        terminalreporter.write_line(line)
