from __future__ import annotations

import numpy as np
import pytest

from inkage.capture import Recording

_RESULTS_KEY = pytest.StashKey[list]()


def make_recording(pen, t=None, x=None, y=None, pressure=None, azimuth=1800, altitude=450):
    """Recording from per-sample columns; scalars broadcast, t defaults to 10 ms steps."""
    n = len(pen)
    cols = []
    for value, default in (
        (x, np.arange(n) * 10 + 100),
        (y, np.full(n, 200)),
        (t, np.arange(n) * 10),
        (pen, None),
        (azimuth, None),
        (altitude, None),
        (pressure, np.full(n, 500)),
    ):
        value = default if value is None else value
        cols.append(np.broadcast_to(np.asarray(value, dtype=np.int64), (n,)))
    return Recording(np.column_stack(cols), "w", "task")


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for the acceptance summary."""
    results = request.config.stash.setdefault(_RESULTS_KEY, [])

    def record(label: str, passed: bool, detail: str = "") -> bool:
        results.append((label, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS_KEY, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {label}" + (f"  ({detail})" if detail else ""))
