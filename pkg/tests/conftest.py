import numpy as np
import pytest

from vsmetric.lattice import LatticeSpace
from vsmetric.smetric import Carrier, VectorSMetric, sum_abs

UNIT = Carrier.interval(0.0, 1.0)


def constant_one_metric():
    return VectorSMetric(UNIT, LatticeSpace.scalar(), lambda x, y, z: np.ones_like(x), "constant_one")


def squared_difference_metric():
    return VectorSMetric(UNIT, LatticeSpace.scalar(), lambda x, y, z: (x - y) ** 2, "squared_difference")


def squared_sum_abs_metric():
    rule = lambda x, y, z: (np.abs(x - y) + np.abs(y - z) + np.abs(z - x)) ** 2
    return VectorSMetric(UNIT, LatticeSpace.scalar(), rule, "squared_sum_abs")


BROKEN = {
    "constant_one": (constant_one_metric, "b"),
    "squared_difference": (squared_difference_metric, "b"),
    "squared_sum_abs": (squared_sum_abs_metric, "c"),
}


@pytest.fixture
def S():
    return sum_abs(UNIT)


# -- acceptance summary -----------------------------------------------------

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    n = getattr(getattr(item, "function", None), "criterion", None)
    if n is None or not (rep.when == "call" or rep.failed):
        return
    title = (item.function.__doc__ or item.name).strip().splitlines()[0]
    ok = rep.passed and _criteria.get(n, (None, True))[1]
    _criteria[n] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
