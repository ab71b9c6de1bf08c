import sys
from pathlib import Path

import numpy as np
import pytest

from flexknn import CANBERRA, EUCLIDEAN, MANHATTAN, ScenarioSpec, generate_scenario, minkowski
from flexknn.core import training_set_from_arrays

sys.path.insert(0, str(Path(__file__).parent))

ALL_METRICS = [EUCLIDEAN, MANHATTAN, minkowski(1.5), minkowski(3.0), minkowski(0.5), CANBERRA]


def random_instance(seed, max_n_train=500, max_dim=16, max_classes=5, grid=None):
    """Random training set and query.

    With ``grid`` set, coordinates are small integers so distance ties are
    common.
    """
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, max_n_train + 1))
    n = int(rng.integers(1, max_dim + 1))
    M = int(rng.integers(1, max_classes + 1))
    if grid:
        X = rng.integers(-grid, grid + 1, size=(N, n)).astype(float)
        q = rng.integers(-grid, grid + 1, size=n).astype(float)
    else:
        X = rng.normal(size=(N, n))
        q = rng.normal(size=n)
    labels = [f"c{v}" for v in rng.integers(0, M, size=N)]
    return training_set_from_arrays(X, labels), q


@pytest.fixture(scope="session")
def fig1():
    return {name: generate_scenario(ScenarioSpec(name)) for name in ("fig1a", "fig1b", "fig1c")}


_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call":
        _criteria.append((marker.args[0], marker.args[1], rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, duration in sorted(_criteria):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"AC{number:>2} {status}  {title}  ({duration:.2f} s)")
