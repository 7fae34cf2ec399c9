import numpy as np
import pytest

from gwpd import (GaussianHagedorn, GaussianHeller, InvalidStateError,
                  PhysicalSetup, density, evaluate_wavefunction,
                  evaluate_wavefunction_hagedorn, hagedorn_to_heller,
                  heller_to_hagedorn, kinetic_step_heller, normalize_initial,
                  position_covariance, wavefunction_gradient)
from gwpd.diagnostics import covariances

from .oracles import trapezoid_norm_sq


def test_setup_validation():
    setup = PhysicalSetup(dim=2, hbar=0.5, mass=[[2.0, 0.1], [0.1, 1.0]])
    assert np.allclose(setup.mass_inv @ setup.mass, np.eye(2), atol=1e-14)
    with pytest.raises(InvalidStateError):
        PhysicalSetup(dim=1, hbar=-1.0)
    with pytest.raises(InvalidStateError):
        PhysicalSetup(dim=2, mass=[[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(InvalidStateError):
        PhysicalSetup(dim=1, mass=[[-1.0]])


def test_state_invariants():
    with pytest.raises(InvalidStateError):
        GaussianHeller([0.0], [0.0], [[1.0 + 0j]], 0.0)  # Im A not positive
    with pytest.raises(InvalidStateError):
        GaussianHeller([0.0, 0.0], [0.0, 0.0],
                       [[1j, 0.5], [0.0, 1j]], 0.0)      # not symmetric
    state = GaussianHeller([0.0], [0.0], [[0.3 + 1j]], 0.0)
    assert state.re_a[0, 0] == 0.3
    assert state.im_a[0, 0] == 1.0


def test_normalize_initial_1d(setup1):
    state = GaussianHeller([0.0], [0.0], [[1j]], 0.0)
    out = normalize_initial(state, setup1)
    assert out.gamma.real == 0.0
    assert out.gamma.imag == pytest.approx(0.25 * np.log(np.pi), abs=1e-14)
    # idempotent
    again = normalize_initial(out, setup1)
    assert again.gamma == out.gamma
    # non-positive width is rejected at construction already
    with pytest.raises(InvalidStateError):
        GaussianHeller([0.0], [0.0], [[-1j]], 0.0)


def test_normalize_initial_2d_quadrature():
    setup = PhysicalSetup(dim=2)
    state = normalize_initial(
        GaussianHeller([0.1, -0.2], [0.0, 0.3], 1j * np.eye(2), 0.0), setup)
    xs = np.linspace(-8, 8, 801)
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    d = pts - state.q
    phase = 0.5 * np.einsum("ni,ij,nj->n", d, state.A, d) + d @ state.p + state.gamma
    vals = np.abs(np.exp(1j * phase)) ** 2
    total = np.sum(vals) * (xs[1] - xs[0]) ** 2
    assert total == pytest.approx(1.0, abs=1e-10)


def test_evaluate_wavefunction_values(setup1):
    state = GaussianHeller([0.0], [0.0], [[1j]], 0.0)
    assert evaluate_wavefunction(state, [0.0], setup1) == pytest.approx(1.0)
    assert evaluate_wavefunction(state, [1.0], setup1) == pytest.approx(np.exp(-0.5), abs=1e-14)
    moving = GaussianHeller([0.0], [2.0], [[1j]], 0.0)
    expected = np.exp(-0.5) * np.exp(2j)
    assert evaluate_wavefunction(moving, [1.0], setup1) == pytest.approx(expected, abs=1e-14)


def test_wavefunction_gradient_matches_fd(setup1):
    state = GaussianHeller([0.2], [0.7], [[0.4 + 1.1j]], 0.1 + 0.2j)
    x = np.array([0.9])
    h = 1e-6
    fd = (evaluate_wavefunction(state, x + h, setup1)
          - evaluate_wavefunction(state, x - h, setup1)) / (2 * h)
    grad = wavefunction_gradient(state, x, setup1)
    assert grad[0] == pytest.approx(fd, rel=1e-8)


def test_density_values(setup1):
    state = normalize_initial(GaussianHeller([0.0], [0.0], [[1j]], 0.0), setup1)
    assert density(state, [0.0], setup1) == pytest.approx(1.0 / np.sqrt(np.pi), abs=1e-14)
    xs = np.linspace(-10, 10, 20001)
    vals = np.array([density(state, [x], setup1) for x in xs[::100]])
    # even function
    assert np.allclose(vals, vals[::-1], atol=1e-15)
    fine = np.array([density(state, [x], setup1) for x in xs])
    assert np.trapezoid(fine, xs) == pytest.approx(1.0, abs=1e-10)


def test_heller_to_hagedorn_basic(setup1):
    state = normalize_initial(GaussianHeller([0.0], [0.0], [[1j]], 0.0), setup1)
    hag = heller_to_hagedorn(state, setup1)
    assert hag.Q[0, 0] == pytest.approx(1.0)
    assert hag.P[0, 0] == pytest.approx(1j)
    rel = np.conj(hag.Q.T) @ hag.P - np.conj(hag.P.T) @ hag.Q
    assert rel[0, 0] == pytest.approx(2j, abs=1e-14)


def test_hagedorn_to_heller_values(setup1):
    hag = GaussianHagedorn([0.0], [0.0], [[1.0 + 0j]], [[1j]], 0.0)
    hel = hagedorn_to_heller(hag, setup1)
    assert hel.A[0, 0] == pytest.approx(1j)
    assert evaluate_wavefunction(hel, [0.0], setup1) == pytest.approx(np.pi ** -0.25, abs=1e-14)
    hag2 = GaussianHagedorn([0.0], [0.0], [[1.0 + 0.5j]], [[1j]], 0.0)
    hel2 = hagedorn_to_heller(hag2, setup1)
    assert hel2.A[0, 0] == pytest.approx(0.4 + 0.8j, abs=1e-14)


def test_hagedorn_symplecticity_enforced():
    with pytest.raises(InvalidStateError):
        GaussianHagedorn([0.0], [0.0], [[1.0 + 0j]], [[2j]], 0.0)


def test_hagedorn_matches_kinetic_flow(setup1):
    # the factorized width (1 + 0.5i, i) is the free flight of A = i at t = 0.5
    start = normalize_initial(GaussianHeller([0.0], [0.0], [[1j]], 0.0), setup1)
    flown = kinetic_step_heller(start, 0.5, setup1)
    assert flown.A[0, 0] == pytest.approx(0.4 + 0.8j, abs=1e-14)
    # free flight of (Q, P, S) = (1, i, 0): S stays 0 (p = 0), the
    # det(Q)^{-1/2} prefactor carries the phase that Re gamma absorbed
    hag = GaussianHagedorn([0.0], [0.0], [[1.0 + 0.5j]], [[1j]], 0.0)
    for x in np.linspace(-1.5, 1.5, 7):
        lhs = evaluate_wavefunction_hagedorn(hag, [x], setup1)
        rhs = evaluate_wavefunction(flown, [x], setup1)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_round_trip_pointwise(setup1):
    rng = np.random.default_rng(7)
    state = normalize_initial(
        GaussianHeller([0.4], [-0.3], [[0.25 + 0.9j]], 1.3), setup1)
    hag = heller_to_hagedorn(state, setup1)
    back = hagedorn_to_heller(hag, setup1)
    assert np.allclose(back.A, state.A, atol=1e-15)
    for x in rng.normal(0.4, 1.5, size=10):
        lhs = evaluate_wavefunction(back, [x], setup1)
        rhs = evaluate_wavefunction(state, [x], setup1)
        assert lhs == pytest.approx(rhs, abs=1e-12)
    # unnormalized states cannot be represented in the factorized form
    with pytest.raises(InvalidStateError):
        heller_to_hagedorn(GaussianHeller([0.0], [0.0], [[1j]], 0.0), setup1)


def test_round_trip_2d():
    setup = PhysicalSetup(dim=2)
    a = np.array([[0.2 + 1.0j, 0.1 + 0.3j], [0.1 + 0.3j, -0.1 + 1.4j]])
    state = normalize_initial(
        GaussianHeller([0.3, -0.2], [0.1, 0.4], a, 0.7), setup)
    hag = heller_to_hagedorn(state, setup)
    c1 = hag.Q.T @ hag.P - hag.P.T @ hag.Q
    c2 = np.conj(hag.Q.T) @ hag.P - np.conj(hag.P.T) @ hag.Q - 2j * np.eye(2)
    assert np.max(np.abs(c1)) < 1e-12 and np.max(np.abs(c2)) < 1e-12
    back = hagedorn_to_heller(hag, setup)
    assert np.allclose(back.A, state.A, atol=1e-13)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.normal(0.0, 1.0, size=2)
        assert evaluate_wavefunction(back, x, setup) == pytest.approx(
            evaluate_wavefunction(state, x, setup), abs=1e-12)


def test_covariance_route_agreement(setup1):
    state = normalize_initial(
        GaussianHeller([0.1], [0.2], [[0.5 + 0.8j]], 0.0), setup1)
    hag = heller_to_hagedorn(state, setup1)
    assert np.allclose(position_covariance(state, setup1),
                       position_covariance(hag, setup1), atol=1e-12)
    ch = covariances(state, setup1)
    cg = covariances(hag, setup1)
    assert np.allclose(ch.cov_q, cg.cov_q, atol=1e-12)
    assert np.allclose(ch.cov_p, cg.cov_p, atol=1e-12)
    assert np.allclose(ch.cov_qp, cg.cov_qp, atol=1e-12)


def test_norm_against_quadrature(setup1):
    state = normalize_initial(
        GaussianHeller([0.5], [1.1], [[0.3 + 0.7j]], 0.2), setup1)
    assert trapezoid_norm_sq(0.5, 1.1, state.A[0, 0], state.gamma) == pytest.approx(
        1.0, abs=1e-10)
