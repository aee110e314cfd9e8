import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from flagmetric.shapes import bumpy_sphere, ellipsoid, sphere

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sphere128():
    return sphere(1.0, 128, 65)


@pytest.fixture(scope="session")
def ellipsoid128():
    return ellipsoid(1.0, 1.0, 2.0, 128, 65)


@pytest.fixture(scope="session")
def sphere64():
    return sphere(1.0, 64, 33)


@pytest.fixture(scope="session")
def ellipsoid64():
    return ellipsoid(1.0, 1.0, 2.0, 64, 33)


@pytest.fixture(scope="session")
def bumpy64():
    return bumpy_sphere(1.0, 0.05, 4, 64, 33)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q
