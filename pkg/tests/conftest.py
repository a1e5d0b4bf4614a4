import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from coexsim import _backend

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(params=_backend.available())
def kernels(request):
    """Each available kernel backend in turn."""
    return _backend.load(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hpd(rng, M, cond=10.0):
    """Random Hermitian positive-definite matrix."""
    Q, _ = np.linalg.qr(rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M)))
    lam = np.linspace(1.0, cond, M)
    return (Q * lam) @ Q.conj().T
