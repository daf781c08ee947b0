import re
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_AC_RESULTS: dict[int, list] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_ac(\d+)_", report.nodeid)
    if not m or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    metrics = [f"{k}={v}" for k, v in report.user_properties]
    _AC_RESULTS.setdefault(int(m.group(1)), []).append((report.nodeid.split("::")[-1], report.passed, metrics))


def pytest_terminal_summary(terminalreporter):
    if not _AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ac in sorted(_AC_RESULTS):
        for name, passed, metrics in _AC_RESULTS[ac]:
            line = f"AC{ac:<2} {'PASS' if passed else 'FAIL'}  {name}"
            if metrics:
                line += "  [" + ", ".join(metrics) + "]"
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
