"""Observables and geometric-property checks.

Covariances of a wavepacket with width matrix A = Re A + i Im A:

    Cov(q)   = (hbar/2) (Im A)^{-1}          = (hbar/2) Q Q^+
    Cov(p)   = (hbar/2) A (Im A)^{-1} A^*    = (hbar/2) P P^+
    Cov(q,p) = Cov(q) A
    Cov_R(q,p) = (hbar/2) (Im A)^{-1} Re A   (real part of the above)

The exact energy is E = T(p) + Tr(m^{-1} Cov(p))/2 + <V>; the effective
energy replaces <V> with V0 + Tr(V2 Sigma)/2.  The reduced symplectic form
on coordinates (q, p, Re A, Im A) is

    omega = sum_j dq_j ^ dp_j + (hbar/4) sum_jk d[(Im A)^{-1}]_jk ^ d[Re A]_kj

with d[(Im A)^{-1}] = -(Im A)^{-1} dIm A (Im A)^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (GaussianHagedorn, GaussianHeller, TangentVector,
                   position_covariance, symmetrize)
from .errors import InvalidStateError
from .potentials import gaussian_expectation_at

__all__ = [
    "DiagnosticsRecord",
    "Covariances",
    "norm",
    "covariances",
    "energy",
    "effective_energy",
    "energy_rate",
    "symplectic_form",
    "symplectic_defect",
    "gaussian_overlap",
    "record",
]


@dataclass(frozen=True)
class Covariances:
    cov_q: np.ndarray
    cov_p: np.ndarray
    cov_qp: np.ndarray
    cov_qp_real: np.ndarray


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-record observables along a trajectory."""

    t: float
    norm: float
    energy: float
    energy_eff: float
    cov_q: np.ndarray
    cov_p: np.ndarray
    cov_qp: np.ndarray
    cov_qp_real: np.ndarray
    symplectic_defect: Optional[float] = None
    energy_rate_predicted: Optional[float] = None


def norm(state, setup):
    """Wavepacket norm.

    In the center/width form: [det(Im A/(pi hbar))]^{-1/4} exp(-Im gamma/hbar).
    The factorized form is normalized by construction, so only rounding drift
    of the Q/P relations shows up.
    """
    if isinstance(state, GaussianHagedorn):
        gram = (state.Q @ state.Q.conj().T).real
        sign, logdet = np.linalg.slogdet(gram)
        det_q = complex(state.Q[0, 0]) if state.dim == 1 else np.linalg.det(state.Q)
        return float(np.exp(0.25 * logdet - np.log(np.abs(det_q))))
    sign, logdet = np.linalg.slogdet(state.im_a / (np.pi * setup.hbar))
    if sign <= 0:
        raise InvalidStateError("Im A must be positive definite")
    return float(np.exp(-0.25 * logdet - state.gamma.imag / setup.hbar))


def covariances(state, setup):
    """Position, momentum and position-momentum covariance matrices."""
    h = setup.hbar
    if isinstance(state, GaussianHagedorn):
        cov_q = symmetrize(0.5 * h * (state.Q @ state.Q.conj().T).real)
        cov_p = symmetrize(0.5 * h * (state.P @ state.P.conj().T).real)
        cov_qp = cov_q @ (state.P @ np.linalg.inv(state.Q))
    else:
        b_inv = np.linalg.inv(state.im_a)
        cov_q = symmetrize(0.5 * h * b_inv)
        cov_p = 0.5 * h * (state.A @ b_inv @ state.A.conj())
        cov_p = symmetrize(np.ascontiguousarray(cov_p.real))
        cov_qp = cov_q @ state.A
    return Covariances(cov_q, cov_p, cov_qp, np.ascontiguousarray(cov_qp.real))


def energy(state, model, engine, setup):
    """Exact energy E = T(p) + Tr(m^{-1} Cov(p))/2 + <V>."""
    cov = covariances(state, setup)
    kin = setup.kinetic_energy(state.p) + 0.5 * np.trace(setup.mass_inv @ cov.cov_p)
    pot = gaussian_expectation_at(model, state.q, cov.cov_q, 0, engine)
    return float(kin + pot)


def effective_energy(state, coeffs, setup):
    """Effective energy <T> + V0 + Tr(V2 Sigma)/2."""
    cov = covariances(state, setup)
    kin = setup.kinetic_energy(state.p) + 0.5 * np.trace(setup.mass_inv @ cov.cov_p)
    return float(kin + coeffs.v0 + 0.5 * np.trace(coeffs.v2 @ cov.cov_q))


def energy_rate(state, coeffs, model, engine, setup):
    """Predicted dE/dt for the given effective coefficients:

        p^T m^{-1} (<V'> - V1) + Tr[m^{-1} (<V''> - V2) Cov_R(q, p)].
    """
    cov = covariances(state, setup)
    grad_exp = gaussian_expectation_at(model, state.q, cov.cov_q, 1, engine)
    hess_exp = gaussian_expectation_at(model, state.q, cov.cov_q, 2, engine)
    term1 = state.p @ setup.mass_inv @ (grad_exp - coeffs.v1)
    term2 = np.trace(setup.mass_inv @ (hess_exp - coeffs.v2) @ cov.cov_qp_real)
    return float(term1 + term2)


def symplectic_form(state, d1, d2, setup):
    """Reduced symplectic form evaluated on two tangent vectors at the
    state."""
    b_inv = np.linalg.inv(state.im_a)
    term = float(d1.dq @ d2.dp - d2.dq @ d1.dp)
    mixed = (b_inv @ d1.d_im_a @ b_inv @ d2.d_re_a
             - b_inv @ d2.d_im_a @ b_inv @ d1.d_re_a)
    return term - 0.25 * setup.hbar * float(np.trace(mixed))


def _chart_basis(dim):
    """Coordinate tangent basis on (q, p, Re A, Im A); symmetric-matrix
    coordinates are the upper-triangle entries."""
    basis = []
    zeros_v = np.zeros(dim)
    zeros_m = np.zeros((dim, dim))
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        basis.append(TangentVector(e, zeros_v, zeros_m, zeros_m))
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        basis.append(TangentVector(zeros_v, e, zeros_m, zeros_m))
    for which in ("re", "im"):
        for i in range(dim):
            for j in range(i, dim):
                m = np.zeros((dim, dim))
                m[i, j] = m[j, i] = 1.0
                if which == "re":
                    basis.append(TangentVector(zeros_v, zeros_v, m, zeros_m))
                else:
                    basis.append(TangentVector(zeros_v, zeros_v, zeros_m, m))
    return basis


def _shift(state, tangent, eps):
    a = state.A + eps * (tangent.d_re_a + 1j * tangent.d_im_a)
    return GaussianHeller(state.q + eps * tangent.dq, state.p + eps * tangent.dp,
                          a, state.gamma)


def symplectic_defect(flow, state, setup, fd_step=1e-6):
    """Worst-case change of the symplectic form under the flow's Jacobian.

    The Jacobian on coordinates (q, p, Re A, Im A) is built by central finite
    differences with step ``fd_step`` per coordinate; the form is evaluated
    at the base point and at its image.  Exactly symplectic flows give a
    defect at the finite-differencing noise floor.
    """
    basis = _chart_basis(state.dim)
    image = flow(state)
    columns = []
    for tangent in basis:
        plus = flow(_shift(state, tangent, fd_step))
        minus = flow(_shift(state, tangent, -fd_step))
        columns.append(TangentVector(
            (plus.q - minus.q) / (2 * fd_step),
            (plus.p - minus.p) / (2 * fd_step),
            (plus.re_a - minus.re_a) / (2 * fd_step),
            (plus.im_a - minus.im_a) / (2 * fd_step)))
    worst = 0.0
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            w_end = symplectic_form(image, columns[i], columns[j], setup)
            w_base = symplectic_form(state, basis[i], basis[j], setup)
            worst = max(worst, abs(w_end - w_base))
    return worst


def _logdet_positive_real(mat):
    if mat.shape == (1, 1):
        lam = complex(mat[0, 0])
        if lam.real <= 0:
            raise InvalidStateError("overlap integrand is not normalizable")
        return np.log(lam)
    lams = np.linalg.eigvals(mat)
    if np.min(lams.real) <= 0:
        raise InvalidStateError("overlap integrand is not normalizable")
    return complex(np.sum(np.log(lams)))


def gaussian_overlap(bra, ket, setup):
    """Closed-form overlap <bra|ket> of two wavepackets.

    The integrand is a complex Gaussian with quadratic-form matrix
    M = A_ket - conj(A_bra); its imaginary part (sum of the two widths) must
    be positive definite for the integral to converge.
    """
    h = setup.hbar
    dim = bra.dim
    m_mat = ket.A - bra.A.conj()
    im_m = np.ascontiguousarray(m_mat.imag)
    min_eig = im_m[0, 0] if dim == 1 else np.linalg.eigvalsh(symmetrize(im_m))[0]
    if min_eig <= 0:
        raise InvalidStateError("overlap integrand is not normalizable")
    v = (ket.p - bra.p) - (ket.A @ ket.q - bra.A.conj() @ bra.q)
    c = (0.5 * (ket.q @ ket.A @ ket.q - bra.q @ bra.A.conj() @ bra.q)
         - ket.p @ ket.q + bra.p @ bra.q + ket.gamma - np.conj(bra.gamma))
    omega_mat = -1j * m_mat / h
    logdet = _logdet_positive_real(omega_mat)
    quad = v @ np.linalg.solve(m_mat, v)
    return complex((2.0 * np.pi) ** (dim / 2.0)
                   * np.exp(-0.5 * logdet - 0.5j * quad / h + 1j * c / h))


def record(state, method, t, rates=False):
    """Assemble the per-step diagnostics used by the propagation driver."""
    setup = method.setup
    coeffs = method.coefficients(state)
    cov = covariances(state, setup)
    kin = setup.kinetic_energy(state.p) + 0.5 * np.trace(setup.mass_inv @ cov.cov_p)
    pot = gaussian_expectation_at(method.model, state.q, cov.cov_q, 0, method.engine)
    e_eff = kin + coeffs.v0 + 0.5 * np.trace(coeffs.v2 @ cov.cov_q)
    rate = None
    if rates:
        rate = energy_rate(state, coeffs, method.model, method.engine, setup)
    return DiagnosticsRecord(
        t=float(t), norm=norm(state, setup), energy=float(kin + pot),
        energy_eff=float(e_eff), cov_q=cov.cov_q, cov_p=cov.cov_p,
        cov_qp=cov.cov_qp, cov_qp_real=cov.cov_qp_real,
        energy_rate_predicted=rate)
