import math

import numpy as np
import pytest

from fraclab.geometry import Ball, Complement, Cylinder, Intersection, Union


@pytest.fixture(scope="session")
def two_balls():
    """Union of the open unit balls at the origin and at (0, 4, 0)."""
    return Union((Ball([0.0, 0.0, 0.0], 1.0), Ball([0.0, 4.0, 0.0], 1.0)))


@pytest.fixture(scope="session")
def unit_ball():
    return Ball([0.0, 0.0, 0.0], 1.0)


@pytest.fixture(scope="session")
def shell():
    """Open region 1 < x1^2 + x2^2 < 2 in R^3."""
    return Intersection(
        (
            Cylinder([0, 0, 0], [0, 0, 1], math.sqrt(2.0)),
            Complement(Cylinder([0, 0, 0], [0, 0, 1], 1.0)),
        )
    )


@pytest.fixture(scope="session")
def p_eps():
    """Boundary point (0, eps, sqrt(1 - eps^2)) of the first ball, eps = 0.1."""
    return np.array([0.0, 0.1, math.sqrt(1.0 - 0.01)])


@pytest.fixture(scope="session")
def fast_opt():
    from fraclab.operators import OptimizerConfig

    return OptimizerConfig(restarts=2, max_iters=30, inner_restarts=8, inner_iters=12)
