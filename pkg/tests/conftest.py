import math

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from sgspin import ControlParams, QubitState

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def control_params(draw, max_omega0=8.0):
    omega0 = draw(st.floats(0.05, max_omega0))
    ratio = draw(st.floats(0.0, 6.0))
    theta = draw(st.floats(0.0, math.pi))
    return ControlParams(omega0, ratio * omega0, theta)


@st.composite
def qubit_states(draw):
    x = draw(st.floats(0.0, 1.0))
    phi0 = draw(st.floats(-math.pi, math.pi))
    phi1 = draw(st.floats(-math.pi, math.pi))
    r0, r1 = math.sqrt(x), math.sqrt(1.0 - x)
    return QubitState(r0 * complex(math.cos(phi0), math.sin(phi0)),
                      r1 * complex(math.cos(phi1), math.sin(phi1))).normalized()


def random_state(rng: np.random.Generator) -> QubitState:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return QubitState.from_vector(v / np.linalg.norm(v))


def random_params(rng: np.random.Generator) -> ControlParams:
    omega0 = rng.uniform(0.1, 8.0)
    return ControlParams(omega0, omega0 * rng.uniform(0.0, 6.0), rng.uniform(0.0, math.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)
