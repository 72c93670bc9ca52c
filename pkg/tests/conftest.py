import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sphere_coarse import builtin_kernel  # noqa: E402

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def _entry(number, title):
    return _CRITERIA.setdefault(number, {"title": title, "failed": [], "ran": 0, "notes": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _entry(number, title)
    if report.when == "call":
        entry["ran"] += 1
    if report.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "FAIL" if entry["failed"] or not entry["ran"] else "PASS"
        line = f"criterion {number:2d}: {status}  {entry['title']}"
        if entry["failed"]:
            line += f"  [failing: {', '.join(entry['failed'])}]"
        tr.write_line(line)
        for note in entry["notes"]:
            tr.write_line(f"    {note}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


KERNEL_SPECS = [("truncation", 4), ("abelpoisson", 0.8), ("gaussian", 10.0)]


@pytest.fixture(params=KERNEL_SPECS, ids=lambda p: f"{p[0]}:{p[1]}")
def kernel_factory(request):
    kind, param = request.param
    return lambda Nmax, r=1.0: builtin_kernel(kind, param, Nmax, r)


@pytest.fixture
def measure(request):
    """Record a measured quantity for the acceptance summary: ``measure(label, value, limit)``."""
    marker = request.node.get_closest_marker("criterion")
    entry = _entry(*marker.args)

    def record(label, value, limit=None):
        bound = "" if limit is None else f" (limit {limit:.0e}: {'ok' if value < limit else 'EXCEEDED'})"
        entry["notes"].append(f"{label} = {value:.3e}{bound}")
        return value

    return record
