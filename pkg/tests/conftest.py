import math

import numpy as np
import pytest

from heistsp import HeisPoint


def intro_triple(eps: float) -> list[HeisPoint]:
    """Two horizontal endpoints with a central vertical bump of height eps."""
    return [HeisPoint(-1.0, 0.0, 0.0), HeisPoint(0.0, 0.0, eps), HeisPoint(1.0, 0.0, 0.0)]


def horizontal_points(n: int = 20, length: float = 1.0) -> list[HeisPoint]:
    return [HeisPoint(x, 0.0, 0.0) for x in np.linspace(0.0, length, n)]


def lifted_circle(n: int = 100) -> list[HeisPoint]:
    ts = np.linspace(0.0, 1.5 * math.pi, n)
    return [HeisPoint(math.cos(t), math.sin(t), 2.0 * t) for t in ts]


def lifted_parabola(n: int = 100) -> list[HeisPoint]:
    ts = np.linspace(-1.0, 1.0, n)
    return [HeisPoint(t, t * t, (2.0 / 3.0) * t ** 3) for t in ts]


def lifted_sine(n: int = 100) -> list[HeisPoint]:
    ts = np.linspace(0.0, 2.0 * math.pi, n)
    return [HeisPoint(t, math.sin(t), 2.0 * t * math.sin(t) + 4.0 * math.cos(t) - 4.0) for t in ts]


def corner_curve_vertices() -> list[HeisPoint]:
    """Unit-length two-edge polygon with one corner; both edges horizontal."""
    return [HeisPoint(0.0, 0.0, 0.0), HeisPoint(0.5, 0.0, 0.0), HeisPoint(0.5, 0.5, 0.5)]


def lifted_point_fixture(n: int = 41, zeta: float = 0.02):
    """Dense horizontal segment plus one vertically lifted point."""
    base = [HeisPoint(x, 0.0, 0.0) for x in np.linspace(-1.0, 1.0, n)]
    lifted = HeisPoint(0.0, 0.0, zeta)
    return base + [lifted], lifted


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)
