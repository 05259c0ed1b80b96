import numpy as np
import pytest

from shocklab.flux import burgers_flux, build_gap_flux, make_states
from shocklab.periodic import PerturbationSpec
from shocklab.profile import compute_profile


@pytest.fixture(scope="session")
def burgers():
    return burgers_flux()


@pytest.fixture(scope="session")
def gap50():
    return build_gap_flux(50, -0.9, 0.9)


@pytest.fixture(scope="session")
def lax_states(burgers):
    return make_states(burgers, 1.0, -1.0)


@pytest.fixture(scope="session")
def profile_nu1(burgers, lax_states):
    return compute_profile(burgers, lax_states, 1.0)


@pytest.fixture(scope="session")
def profile_nu_half(burgers, lax_states):
    return compute_profile(burgers, lax_states, 0.5)


@pytest.fixture(scope="session")
def sine02():
    return PerturbationSpec("sine", 0.2, 1.0)


@pytest.fixture(scope="session")
def zero_spec():
    return PerturbationSpec("sine", 0.0, 1.0)


def l2(x):
    return float(np.sqrt(np.sum(np.square(x))))
