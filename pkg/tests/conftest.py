import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tsallis_ops import ensembles as ens

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def gen():
    return ens.SeededGenerator(2024)


@pytest.fixture
def pd_pair(gen):
    return ens.random_pd(gen.derive("A"), 3), ens.random_pd(gen.derive("B"), 3)


def seeds(n):
    return [ens.SeededGenerator(7).derive("fixture", i) for i in range(n)]


def assert_close(X, Y, rtol=1e-10, atol=1e-12):
    x = X.array if hasattr(X, "array") else np.asarray(X)
    y = Y.array if hasattr(Y, "array") else np.asarray(Y)
    np.testing.assert_allclose(x, y, rtol=rtol, atol=atol)
