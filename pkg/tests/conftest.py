from importlib import resources

import numpy as np
import pytest

from hyperideal.surface import parse_problem


def bundled_text(name):
    return resources.files("hyperideal").joinpath(f"instances/{name}").read_text()


def bundled_instance(name):
    return parse_problem(bundled_text(name))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def torus_instance():
    return bundled_instance("torus.json")


@pytest.fixture
def disk2_instance():
    return bundled_instance("disk2.json")


@pytest.fixture
def fan3_instance():
    return bundled_instance("fan3.json")


@pytest.fixture
def triangle_instance():
    return bundled_instance("triangle.json")
