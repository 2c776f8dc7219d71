import numpy as np
import pytest

from isingstring.hilbert import HilbertSpace, StateVector
from isingstring.params import SystemParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def small_params(**overrides):
    """A valid default parameter set for unit tests."""
    base = dict(L=4, w=2, t_max=1.0, l=1, h_x=0.2, h_z=1.0, omega0=1.0,
                g=0.0, n_max=0, dt_sample=0.5, dt_step=0.05,
                krylov_dim=20, krylov_tol=1e-10)
    base.update(overrides)
    return SystemParams(**base)


def random_state(space: HilbertSpace, rng) -> StateVector:
    amps = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    amps /= np.linalg.norm(amps)
    return StateVector(amps, space)
