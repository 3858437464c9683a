import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.register_profile("ci", parent=settings.get_profile("default"), derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

# acceptance criteria register here; the summary hook prints one line each
ACCEPTANCE: dict[int, tuple[str, bool, float, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, elapsed, budget = ACCEPTANCE[k]
        tr.write_line(f"criterion {k:2d}  {'PASS' if ok else 'FAIL'}  {elapsed:7.2f}s "
                      f"(budget {budget:g}s)  {title}")


@pytest.fixture(scope="session")
def acceptance():
    return ACCEPTANCE
