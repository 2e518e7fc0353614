import numpy as np
import pytest

from hermlab.charts import flat_torus, fubini_study, iwasawa, nonbalanced_example
from hermlab.hodge import fs_sphere_quadrature, torus_quadrature


@pytest.fixture(scope="session")
def fs1():
    return fubini_study(1)


@pytest.fixture(scope="session")
def fs2():
    return fubini_study(2)


@pytest.fixture(scope="session")
def torus1():
    return flat_torus(1)


@pytest.fixture(scope="session")
def torus2():
    return flat_torus(2)


@pytest.fixture(scope="session")
def iwa():
    return iwasawa()


@pytest.fixture(scope="session")
def nonbal():
    return nonbalanced_example()


@pytest.fixture(scope="session")
def fs_quad():
    return fs_sphere_quadrature(64, 128)


@pytest.fixture(scope="session")
def torus_quad():
    return torus_quadrature(1, per_axis=32)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_points(rng, n, count, scale=0.5):
    return [rng.standard_normal(n) * scale + 1j * rng.standard_normal(n) * scale
            for _ in range(count)]
