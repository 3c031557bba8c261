import math

import numpy as np
import pytest

from stitsim import HyperplaneMeasure, Polygon, rectangle, stit_pair


@pytest.fixture
def unit_square():
    return rectangle(0.0, 0.0, 1.0, 1.0)


@pytest.fixture
def triangle():
    return Polygon([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


@pytest.fixture
def iso_measure():
    return HyperplaneMeasure(1.0)


@pytest.fixture
def stit_rules(iso_measure):
    return stit_pair(iso_measure)


@pytest.fixture
def rng():
    return np.random.default_rng(20230815)


def trapezoid_width_integral(poly, n=256):
    """Independent quadrature oracle for the isotropic hitting mass (intensity 1)."""
    from stitsim.geometry import width

    thetas = np.linspace(0.0, math.pi, n + 1)
    vals = [width(poly, t) for t in thetas]
    return np.trapezoid(vals, thetas) / math.pi
