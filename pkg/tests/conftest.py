import numpy as np
import pytest

from graspforge.fixtures import fixture_path
from graspforge.geometry import icosphere, load_mesh
from graspforge.kinematics import load_arms, load_hand


@pytest.fixture(scope="session")
def hand():
    return load_hand(fixture_path("hand.json"))


@pytest.fixture(scope="session")
def arms():
    return load_arms(fixture_path("arm.json"))


@pytest.fixture(scope="session")
def sphere_mesh():
    return load_mesh(fixture_path("meshes/icosphere_r004_s3.obj"))


@pytest.fixture(scope="session")
def coarse_sphere():
    return icosphere(0.04, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from _acceptance import lines
    rows = lines()
    if rows:
        terminalreporter.section("acceptance criteria")
        for row in rows:
            terminalreporter.write_line(row)
