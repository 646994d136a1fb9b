"""Shared fixtures: the two reference surfaces and a couple of standard arcs."""

import numpy as np
import pytest

from qcilab import (
    builtin_moment_map,
    latitude_arc,
    longitude_arc,
    make_profile,
)


@pytest.fixture(scope="session")
def sphere():
    return make_profile("sphere", [])


@pytest.fixture(scope="session")
def perturbed():
    # f(t)^2 = (1 - t^2)(1 + 0.2 t), a mild asymmetric bump
    return make_profile("polynomial-perturbed", [1.0, 0.2])


@pytest.fixture(scope="session")
def sphere_map(sphere):
    return builtin_moment_map(sphere)


@pytest.fixture
def equator_arc(sphere):
    return latitude_arc(sphere, (0.0, np.pi / 3))


@pytest.fixture
def upper_longitude(sphere):
    return longitude_arc(sphere, (0.3, 0.8), 0.0)
