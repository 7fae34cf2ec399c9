"""Wavepacket state types and conversions.

A complex Gaussian wavepacket in D dimensions can be held in two equivalent
parametrizations:

* center/width form: position q, momentum p, complex symmetric width matrix A
  (positive-definite imaginary part), complex phase/normalization scalar gamma.
  The wavefunction is

      psi(x) = exp[(i/hbar) (0.5 (x-q)^T A (x-q) + p^T (x-q) + gamma)].

* factorized form: q, p, complex matrices (Q, P) with A = P Q^{-1} plus the
  symplecticity relations Q^T P - P^T Q = 0 and Q^+ P - P^+ Q = 2i Id, and a
  real action-like scalar S.  The wavefunction is

      psi(x) = (pi hbar)^{-D/4} det(Q)^{-1/2}
               exp[(i/hbar) (0.5 (x-q)^T P Q^{-1} (x-q) + p^T (x-q) + S)],

  which is normalized by construction.  An integer branch counter tracks the
  winding of det Q so that det(Q)^{-1/2} stays continuous along a trajectory.

All state objects are immutable value objects; every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError

__all__ = [
    "PhysicalSetup",
    "GaussianHeller",
    "GaussianHagedorn",
    "TangentVector",
    "normalize_initial",
    "evaluate_wavefunction",
    "wavefunction_gradient",
    "evaluate_wavefunction_hagedorn",
    "density",
    "position_covariance",
    "heller_to_hagedorn",
    "hagedorn_to_heller",
]

# tolerances for structural invariants
SYMMETRY_TOL = 1e-12        # relative, ||A - A^T|| <= tol * ||A||
POSDEF_TOL = 1e-12          # smallest eigenvalue of Im A must exceed this
SYMPLECTIC_TOL = 1e-10      # absolute, on the Q/P relations


def symmetrize(mat):
    """(M + M^T)/2; suppresses floating-point drift of analytically
    symmetric matrices."""
    return 0.5 * (mat + mat.T)


def _as_vector(v, dim, name):
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.shape != (dim,):
        raise InvalidStateError(f"{name} must be a real vector of length {dim}, got shape {arr.shape}")
    return arr


def _as_matrix(mat, dim, name, dtype=complex):
    arr = np.atleast_2d(np.asarray(mat, dtype=dtype))
    if arr.shape != (dim, dim):
        raise InvalidStateError(f"{name} must be a {dim}x{dim} matrix, got shape {arr.shape}")
    return arr


def _min_eig_sym(mat):
    # smallest eigenvalue of a real symmetric matrix; scalar fast path
    if mat.shape == (1, 1):
        return mat[0, 0]
    return np.linalg.eigvalsh(mat)[0]


def _check_symmetric(mat, name):
    scale = np.linalg.norm(mat)
    if scale > 0 and np.linalg.norm(mat - mat.T) > SYMMETRY_TOL * max(scale, 1.0) * 10:
        raise InvalidStateError(f"{name} is not symmetric")


@dataclass(frozen=True)
class PhysicalSetup:
    """Dimension, hbar and the (possibly non-diagonal) mass matrix.

    Parameters
    ----------
    dim : int
        Number of degrees of freedom D.
    hbar : float
        Reduced Planck constant in the working units.
    mass : array_like, optional
        Real symmetric positive-definite D x D mass matrix; a scalar is
        promoted to ``scalar * Id``.  Defaults to the identity.
    """

    dim: int
    hbar: float = 1.0
    mass: np.ndarray = None
    mass_inv: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.dim < 1 or int(self.dim) != self.dim:
            raise InvalidStateError(f"dim must be a positive integer, got {self.dim}")
        if not self.hbar > 0:
            raise InvalidStateError(f"hbar must be positive, got {self.hbar}")
        if self.mass is None:
            m = np.eye(self.dim)
        else:
            m = np.asarray(self.mass, dtype=float)
            if m.ndim == 0:
                m = float(m) * np.eye(self.dim)
            m = _as_matrix(m, self.dim, "mass", dtype=float)
        rel = np.linalg.norm(m - m.T) / max(np.linalg.norm(m), 1e-300)
        if rel > 1e-12:
            raise InvalidStateError("mass matrix must be symmetric to 1e-12 relative")
        m = symmetrize(m)
        if _min_eig_sym(m) <= 0:
            raise InvalidStateError("mass matrix must be positive definite")
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "mass_inv", np.linalg.inv(m))

    def kinetic_energy(self, p):
        """Classical kinetic energy p^T m^{-1} p / 2."""
        return 0.5 * float(p @ self.mass_inv @ p)


@dataclass(frozen=True)
class GaussianHeller:
    """Gaussian wavepacket in the center/width parametrization.

    Attributes
    ----------
    q, p : (D,) float arrays
        Phase-space center.
    A : (D, D) complex array
        Symmetric width matrix with positive-definite imaginary part.
    gamma : complex
        Phase (real part) and normalization (imaginary part) scalar.
    """

    q: np.ndarray
    p: np.ndarray
    A: np.ndarray
    gamma: complex

    def __post_init__(self):
        dim = np.atleast_1d(np.asarray(self.q)).shape[0]
        object.__setattr__(self, "q", _as_vector(self.q, dim, "q"))
        object.__setattr__(self, "p", _as_vector(self.p, dim, "p"))
        a = _as_matrix(self.A, dim, "A")
        scale = np.linalg.norm(a)
        if np.linalg.norm(a - a.T) > SYMMETRY_TOL * max(scale, 1.0):
            raise InvalidStateError("width matrix A must be symmetric")
        a = symmetrize(a)
        if _min_eig_sym(np.ascontiguousarray(a.imag)) <= POSDEF_TOL:
            raise InvalidStateError("Im A must be positive definite")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "gamma", complex(self.gamma))

    @classmethod
    def _unchecked(cls, q, p, a, gamma):
        # fast interior constructor for integrator sub-flows; callers
        # guarantee the invariants
        obj = object.__new__(cls)
        object.__setattr__(obj, "q", q)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "A", a)
        object.__setattr__(obj, "gamma", gamma)
        return obj

    @property
    def dim(self):
        return self.q.shape[0]

    @property
    def re_a(self):
        """Real part of the width matrix (spatial chirp)."""
        return np.ascontiguousarray(self.A.real)

    @property
    def im_a(self):
        """Imaginary part of the width matrix (inverse-covariance scale)."""
        return np.ascontiguousarray(self.A.imag)


@dataclass(frozen=True)
class GaussianHagedorn:
    """Gaussian wavepacket in the factorized (Q, P, S) parametrization.

    ``branch`` counts full windings of arg det Q accumulated along a
    trajectory; it disambiguates det(Q)^{-1/2} beyond the principal branch.
    """

    q: np.ndarray
    p: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    S: float
    branch: int = 0

    def __post_init__(self):
        dim = np.atleast_1d(np.asarray(self.q)).shape[0]
        object.__setattr__(self, "q", _as_vector(self.q, dim, "q"))
        object.__setattr__(self, "p", _as_vector(self.p, dim, "p"))
        qq = _as_matrix(self.Q, dim, "Q")
        pp = _as_matrix(self.P, dim, "P")
        c1 = qq.T @ pp - pp.T @ qq
        c2 = qq.conj().T @ pp - pp.conj().T @ qq - 2j * np.eye(dim)
        if np.max(np.abs(c1)) > SYMPLECTIC_TOL or np.max(np.abs(c2)) > SYMPLECTIC_TOL:
            raise InvalidStateError("Q/P symplecticity relations violated")
        if not np.isfinite(np.linalg.cond(qq)) or np.linalg.cond(qq) > 1e14:
            raise InvalidStateError("Q must be invertible")
        object.__setattr__(self, "Q", qq)
        object.__setattr__(self, "P", pp)
        object.__setattr__(self, "S", float(np.real(self.S)))
        object.__setattr__(self, "branch", int(self.branch))

    @classmethod
    def _unchecked(cls, q, p, qq, pp, s, branch):
        obj = object.__new__(cls)
        object.__setattr__(obj, "q", q)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "Q", qq)
        object.__setattr__(obj, "P", pp)
        object.__setattr__(obj, "S", s)
        object.__setattr__(obj, "branch", branch)
        return obj

    @property
    def dim(self):
        return self.q.shape[0]

    @property
    def A(self):
        """Equivalent width matrix P Q^{-1}."""
        return symmetrize(self.P @ np.linalg.inv(self.Q))

    @property
    def im_a(self):
        """Im A = (Q Q^+)^{-1}, computed without forming A."""
        return symmetrize(np.linalg.inv((self.Q @ self.Q.conj().T).real))

    def det_q_log(self):
        """log det Q with the phase unwound by the branch counter."""
        det = np.linalg.det(self.Q)
        return np.log(np.abs(det)) + 1j * (np.angle(det) + 2.0 * np.pi * self.branch)


@dataclass(frozen=True)
class TangentVector:
    """Tangent direction on the reduced parameter space (q, p, Re A, Im A)."""

    dq: np.ndarray
    dp: np.ndarray
    d_re_a: np.ndarray
    d_im_a: np.ndarray

    def __post_init__(self):
        dim = np.atleast_1d(np.asarray(self.dq)).shape[0]
        object.__setattr__(self, "dq", _as_vector(self.dq, dim, "dq"))
        object.__setattr__(self, "dp", _as_vector(self.dp, dim, "dp"))
        ra = _as_matrix(self.d_re_a, dim, "d_re_a", dtype=float)
        ia = _as_matrix(self.d_im_a, dim, "d_im_a", dtype=float)
        _check_symmetric(ra, "d_re_a")
        _check_symmetric(ia, "d_im_a")
        object.__setattr__(self, "d_re_a", symmetrize(ra))
        object.__setattr__(self, "d_im_a", symmetrize(ia))


def normalize_initial(state, setup):
    """Return the state with Im gamma set so that the norm is exactly one.

    Im gamma is chosen from exp(-Im gamma/hbar) = det(Im A/(pi hbar))^{1/4};
    the real part of gamma is kept.
    """
    b = state.im_a
    sign, logdet = np.linalg.slogdet(b / (np.pi * setup.hbar))
    if sign <= 0:
        raise InvalidStateError("Im A must be positive definite")
    im_gamma = -0.25 * setup.hbar * logdet
    return GaussianHeller(state.q, state.p, state.A, state.gamma.real + 1j * im_gamma)


def evaluate_wavefunction(state, q_point, setup):
    """Value of the wavepacket at one position (complex scalar)."""
    x = np.asarray(q_point, dtype=float).reshape(state.dim) - state.q
    phase = 0.5 * (x @ state.A @ x) + state.p @ x + state.gamma
    return np.exp(1j * phase / setup.hbar)


def wavefunction_gradient(state, q_point, setup):
    """Spatial gradient of the wavepacket: (i/hbar) (A x + p) psi."""
    x = np.asarray(q_point, dtype=float).reshape(state.dim) - state.q
    xi = state.A @ x + state.p
    return (1j / setup.hbar) * xi * evaluate_wavefunction(state, q_point, setup)


def _hagedorn_prefactor(state, setup):
    dim = state.dim
    return (np.pi * setup.hbar) ** (-dim / 4.0) * np.exp(-0.5 * state.det_q_log())


def evaluate_wavefunction_hagedorn(state, q_point, setup):
    """Value of the factorized-form wavepacket at one position."""
    x = np.asarray(q_point, dtype=float).reshape(state.dim) - state.q
    a = state.P @ np.linalg.inv(state.Q)
    phase = 0.5 * (x @ a @ x) + state.p @ x + state.S
    return _hagedorn_prefactor(state, setup) * np.exp(1j * phase / setup.hbar)


def position_covariance(state, setup):
    """Position covariance Sigma = (hbar/2) (Im A)^{-1}; accepts either
    parametrization."""
    if isinstance(state, GaussianHagedorn):
        return symmetrize(0.5 * setup.hbar * (state.Q @ state.Q.conj().T).real)
    return symmetrize(0.5 * setup.hbar * np.linalg.inv(state.im_a))


def density(state, x, setup):
    """Probability density of a normalized wavepacket at position x."""
    sigma = position_covariance(state, setup)
    dx = np.asarray(x, dtype=float).reshape(state.dim) - state.q
    sign, logdet = np.linalg.slogdet(2.0 * np.pi * sigma)
    if sign <= 0:
        raise InvalidStateError("position covariance is singular")
    try:
        arg = dx @ np.linalg.solve(sigma, dx)
    except np.linalg.LinAlgError as exc:
        raise InvalidStateError("position covariance is singular") from exc
    return float(np.exp(-0.5 * logdet - 0.5 * arg))


def _norm_heller(state, setup):
    sign, logdet = np.linalg.slogdet(state.im_a / (np.pi * setup.hbar))
    if sign <= 0:
        raise InvalidStateError("Im A must be positive definite")
    return np.exp(-0.25 * logdet - state.gamma.imag / setup.hbar)


def heller_to_hagedorn(state, setup):
    """Convert to the factorized parametrization.

    Uses the real symmetric factor Q = (Im A)^{-1/2}, P = A Q, for which
    det Q > 0 and the prefactor phase vanishes, so S = Re gamma.  The state
    must be normalized (the factorized form fixes the norm to one).
    """
    if abs(_norm_heller(state, setup) - 1.0) > 1e-8:
        raise InvalidStateError(
            "conversion requires a normalized state; call normalize_initial first")
    b = state.im_a
    vals, vecs = np.linalg.eigh(b)
    if vals[0] <= POSDEF_TOL:
        raise InvalidStateError("Im A must be positive definite")
    q_mat = (vecs * (1.0 / np.sqrt(vals))) @ vecs.T   # B^{-1/2}, real SPD
    p_mat = state.A @ q_mat
    return GaussianHagedorn(state.q, state.p, q_mat.astype(complex), p_mat,
                            state.gamma.real, branch=0)


def hagedorn_to_heller(state, setup):
    """Convert to the center/width parametrization.

    A = P Q^{-1}; gamma absorbs S together with the prefactor
    (pi hbar)^{-D/4} det(Q)^{-1/2} on the branch recorded in the state, so
    the two forms agree pointwise.
    """
    try:
        a = symmetrize(state.P @ np.linalg.inv(state.Q))
    except np.linalg.LinAlgError as exc:
        raise InvalidStateError("Q is singular") from exc
    dim = state.dim
    log_q = state.det_q_log()
    gamma = (state.S - 0.5 * setup.hbar * log_q.imag
             + 1j * setup.hbar * (0.25 * dim * np.log(np.pi * setup.hbar)
                                  + 0.5 * log_q.real))
    return GaussianHeller(state.q, state.p, a, gamma)
