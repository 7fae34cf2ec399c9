import numpy as np
import pytest

from gwpd import (ExpectationEngine, GaussianHeller, MethodSpec, MorsePotential,
                  PhysicalSetup, bind, normalize_initial)


@pytest.fixture(scope="session")
def engine():
    return ExpectationEngine(order=16)


@pytest.fixture
def setup1():
    return PhysicalSetup(dim=1, hbar=1.0)


# Bound anharmonic regime used throughout the propagation tests: the default
# Morse well (d_e = 0.1, a = 1, m = 1) binds the wavepacket once hbar is small
# against the well depth; at hbar = 1 the zero-point energy alone exceeds d_e
# and every trajectory dissociates.
MORSE_HBAR = 0.05
MORSE_WIDTH = np.sqrt(0.2)      # ground-state width of the harmonic bottom


@pytest.fixture(scope="session")
def morse_setup():
    return PhysicalSetup(dim=1, hbar=MORSE_HBAR)


@pytest.fixture(scope="session")
def morse_model():
    return MorsePotential(d_e=0.1, a=1.0, q_e=0.0)


def bound_morse_state(setup, q0=0.3, p0=0.0, re_a=0.0):
    state = GaussianHeller([q0], [p0], [[re_a + 1j * MORSE_WIDTH]], 0.0)
    return normalize_initial(state, setup)


@pytest.fixture
def morse_state(morse_setup):
    return bound_morse_state(morse_setup)


def make_method(method_id, model, setup, q_ref=(0.0,), engine_order=16):
    spec = MethodSpec(method_id, q_ref=q_ref)
    return bind(spec, model, setup, engine=ExpectationEngine(order=engine_order))
