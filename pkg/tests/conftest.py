import numpy as np
import pytest

from mtcrelay import kernels
from mtcrelay.domain import DeploymentParams, RadioParams, SpectrumPlan
from mtcrelay.geometry import NetworkSnapshot

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def radio():
    return RadioParams(eta_db=3.0, alpha=5.0)


@pytest.fixture(scope="session")
def plan():
    return SpectrumPlan(r1=1800, r2=1800, omega1=30, omega2=5)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def random_snapshot(rng, n_dev=200, n_gw=12, L=500.0):
    return NetworkSnapshot(rng.uniform(0, L, (n_dev, 2)), rng.uniform(0, L, (n_gw, 2)), L)


@pytest.fixture
def snapshot_factory():
    return random_snapshot


@pytest.fixture(scope="session")
def figure_deployment():
    # window used for all figure-style experiments
    return DeploymentParams(lambda_d=2e-3, lambda_g=1e-4, window=500.0, base_seed=7)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def brute_torus_distance(a, b, L):
    """Minimum Euclidean distance over the 9 periodic images of ``b``."""
    best = np.inf
    for sx in (-L, 0.0, L):
        for sy in (-L, 0.0, L):
            best = min(best, float(np.hypot(a[0] - b[0] - sx, a[1] - b[1] - sy)))
    return best
