import math

import numpy as np
import pytest

from hiddenpol.bell import Scenario, search_operator_max
from hiddenpol.cascade import HvModel, hv_two, min_beta_sweep
from hiddenpol.model import HvStep

ALPHA_GRID_DEG = np.arange(91.0)

SEARCH_SEED = 7


@pytest.fixture(scope="session")
def tensor_search():
    return search_operator_max(Scenario.TENSOR, 4, 64, SEARCH_SEED)


@pytest.fixture(scope="session")
def free_search():
    return search_operator_max(Scenario.FREE, 4, 200, SEARCH_SEED)


@pytest.fixture(scope="session")
def hv_p2_curve():
    """Quadrature P2 for the default law on the 0..90 degree grid."""
    law = HvStep()
    return np.array([hv_two(math.radians(a), law, law) for a in ALPHA_GRID_DEG])


@pytest.fixture(scope="session")
def hv_sweep_rows():
    return min_beta_sweep([math.radians(a) for a in ALPHA_GRID_DEG], HvModel())


_criteria: dict[str, str] = {}
_records: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        _criteria[name] = "PASS" if report.passed else "FAIL"
    if report.when == "call":
        _records.extend((key, str(value)) for key, value in report.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criteria.items():
        terminalreporter.write_line(f"{outcome}  {name}")
    for key, value in _records:
        terminalreporter.write_line(f"recorded  {key} = {value}")
