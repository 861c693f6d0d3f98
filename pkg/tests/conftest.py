import math

import numpy as np
import pytest

from stratlab.links import Circle
from stratlab.montecarlo import sample_points
from stratlab.spaces import RoundSphereSpace, SuspensionSpace
from stratlab.spectral import build_graph, default_bandwidth, spectrum


@pytest.fixture(scope="session")
def s2_model():
    return RoundSphereSpace(2)


@pytest.fixture(scope="session")
def s2_cloud(s2_model):
    return sample_points(s2_model, 4000, seed=2)


@pytest.fixture(scope="session")
def s2_graph(s2_model, s2_cloud):
    return build_graph(s2_cloud, default_bandwidth(s2_model, 4000))


@pytest.fixture(scope="session")
def s2_spectrum(s2_graph):
    return spectrum(s2_graph, k=6)


@pytest.fixture(scope="session")
def spindle_half():
    return SuspensionSpace(Circle(0.5))


@pytest.fixture(scope="session")
def spindle_half_graph(spindle_half):
    cloud = sample_points(spindle_half, 4000, seed=4)
    return build_graph(cloud, default_bandwidth(spindle_half, 4000))


@pytest.fixture(scope="session")
def spindle_half_spectrum(spindle_half_graph):
    return spectrum(spindle_half_graph, k=6)


@pytest.fixture(scope="session")
def circle_model():
    return RoundSphereSpace(1)


@pytest.fixture(scope="session")
def circle_graph(circle_model):
    cloud = sample_points(circle_model, 2000, seed=3)
    return build_graph(cloud, default_bandwidth(circle_model, 2000))
