import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from genball import Signature

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

R2 = np.sqrt(2.0)


def cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def block_ex52():
    I = np.eye(2)
    return np.block([[R2 * I, I], [I, R2 * I]])


def proj_close(u, v, atol=1e-8):
    u = np.asarray(u, dtype=complex) / np.linalg.norm(u)
    v = np.asarray(v, dtype=complex) / np.linalg.norm(v)
    return abs(abs(np.vdot(u, v)) - 1.0) <= atol


@pytest.fixture
def s11():
    return Signature(1, 1)


@pytest.fixture
def s22():
    return Signature(2, 2)
