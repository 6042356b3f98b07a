import os

import numpy as np
import pytest

from tspqaoa import kernels, simulator
from tspqaoa.instances import TspInstance

_ACCEPTANCE = {}


@pytest.fixture
def square():
    """Unit square, cities listed around the perimeter."""
    return TspInstance.from_coords([(0, 0), (0, 1), (1, 1), (1, 0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=kernels.available_backends())
def backend(request, monkeypatch):
    """Run the simulator on each kernel backend in turn."""
    mod = kernels.get_backend(request.param)
    monkeypatch.setattr(simulator, "kernels", mod)
    return request.param


def pytest_collection_modifyitems(config, items):
    if os.environ.get("TSPQAOA_RUN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="offline check; set TSPQAOA_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_runtest_logreport(report):
    if report.when not in ("setup", "call"):
        return
    marker = report.keywords.get("acceptance")
    if not marker:
        return
    item_id = report.nodeid
    if report.when == "setup" and report.skipped:
        _ACCEPTANCE[item_id] = "SKIP"
    elif report.when == "call":
        _ACCEPTANCE[item_id] = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    elif report.failed:
        _ACCEPTANCE[item_id] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, status in sorted(_ACCEPTANCE.items(), key=lambda kv: kv[0]):
        terminalreporter.write_line(f"{status:4}  {nodeid.split('::')[-1]}")
