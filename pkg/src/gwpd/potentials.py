"""Model potentials with derivative tensors up to fourth order and Gaussian
expectation values.

Each model exposes ``evaluate(q, order)`` returning the value (order 0),
gradient (1), Hessian (2) or the totally symmetric third/fourth derivative
tensors (3, 4).  Orders without an analytic formula fall back to
Richardson-extrapolated central differences of the highest analytic
derivative.

Expectation values <V^(j)> over the Gaussian density are computed exactly
from moments when the potential is a polynomial of degree <= 4, and by
tensor-product Gauss-Hermite quadrature otherwise.
"""

from __future__ import annotations

import itertools
import warnings

import numpy as np

from .core import position_covariance, symmetrize
from .errors import GwpdError, InvalidStateError

__all__ = [
    "PotentialModel",
    "HarmonicPotential",
    "MorsePotential",
    "QuarticDoubleWellPotential",
    "PolynomialPotential",
    "TabulatedPotential",
    "build_potential",
    "evaluate",
    "finite_difference_tensor",
    "ExpectationEngine",
    "gaussian_expectation",
    "QuadratureOrderWarning",
]

# default central-difference steps (position units), Richardson-extrapolated
FD_STEPS = {3: 1e-3, 4: 5e-3}


class QuadratureOrderWarning(UserWarning):
    """Quadrature order too low to integrate the model's polynomial degree
    exactly."""


def _symmetrize_tensor(t):
    """Average a tensor over all index permutations."""
    rank = t.ndim
    if rank < 2:
        return t
    acc = np.zeros_like(t)
    perms = list(itertools.permutations(range(rank)))
    for perm in perms:
        acc += np.transpose(t, perm)
    return acc / len(perms)


class PotentialModel:
    """Base class: analytic derivatives up to ``max_analytic_order``,
    finite-difference fallback above.

    Attributes
    ----------
    kind : str
    dim : int
    max_analytic_order : int
    polynomial_degree : int or None
        Set when the potential is globally a polynomial of that degree;
        enables exact moment-based expectation values.
    """

    kind = "base"
    max_analytic_order = 4
    polynomial_degree = None

    def __init__(self, dim):
        self.dim = int(dim)

    # subclasses implement _analytic(q, order) for order <= max_analytic_order
    def _analytic(self, q, order):
        raise NotImplementedError

    def evaluate(self, q, order):
        """Derivative tensor of rank ``order`` at position q."""
        if not 0 <= order <= 4:
            raise GwpdError(f"derivative order must be 0..4, got {order}")
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if order <= self.max_analytic_order:
            return self._analytic(q, order)
        return finite_difference_tensor(self, q, order)

    def evaluate_many(self, points, order):
        """Vectorized evaluation over points of shape (N, D); default loops."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.array([self.evaluate(pt, order) for pt in points])


class HarmonicPotential(PotentialModel):
    """V(q) = offset + (q - center)^T K (q - center) / 2 with K positive
    definite."""

    kind = "harmonic"
    polynomial_degree = 2

    def __init__(self, hessian, center=None, offset=0.0):
        k = np.atleast_2d(np.asarray(hessian, dtype=float))
        super().__init__(k.shape[0])
        if k.shape != (self.dim, self.dim) or np.linalg.norm(k - k.T) > 1e-12 * max(np.linalg.norm(k), 1.0):
            raise GwpdError("harmonic hessian must be square symmetric")
        if np.linalg.eigvalsh(k)[0] <= 0:
            raise GwpdError("harmonic hessian must be positive definite")
        self.hessian = symmetrize(k)
        self.center = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        self.offset = float(offset)

    def _analytic(self, q, order):
        x = q - self.center
        if order == 0:
            return self.offset + 0.5 * float(x @ self.hessian @ x)
        if order == 1:
            return self.hessian @ x
        if order == 2:
            return self.hessian.copy()
        return np.zeros((self.dim,) * order)

    def evaluate_many(self, points, order):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        x = points - self.center
        if order == 0:
            return self.offset + 0.5 * np.einsum("ni,ij,nj->n", x, self.hessian, x)
        if order == 1:
            return x @ self.hessian.T
        return np.broadcast_to(self._analytic(points[0], order),
                               (points.shape[0],) + (self.dim,) * order).copy()


class MorsePotential(PotentialModel):
    """One-dimensional Morse well

        V(q) = d_e (1 - exp(-a (q - q_e)))^2.
    """

    kind = "morse"

    def __init__(self, d_e=0.1, a=1.0, q_e=0.0):
        super().__init__(1)
        if d_e <= 0 or a <= 0:
            raise GwpdError("Morse parameters require d_e > 0 and a > 0")
        self.d_e = float(d_e)
        self.a = float(a)
        self.q_e = float(q_e)

    def _derivs(self, u, order):
        d, a = self.d_e, self.a
        if order == 0:
            return d * (1.0 - u) ** 2
        if order == 1:
            return 2.0 * d * a * (u - u * u)
        if order == 2:
            return 2.0 * d * a ** 2 * (2.0 * u * u - u)
        if order == 3:
            return 2.0 * d * a ** 3 * (u - 4.0 * u * u)
        return 2.0 * d * a ** 4 * (8.0 * u * u - u)

    def _analytic(self, q, order):
        u = np.exp(-self.a * (q[0] - self.q_e))
        val = self._derivs(u, order)
        if order == 0:
            return float(val)
        return np.full((1,) * order, val)

    def evaluate_many(self, points, order):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        u = np.exp(-self.a * (points[:, 0] - self.q_e))
        vals = self._derivs(u, order)
        if order == 0:
            return vals
        return vals.reshape((-1,) + (1,) * order)


class QuarticDoubleWellPotential(PotentialModel):
    """One-dimensional double well V(q) = a (q^2 - b^2)^2 with minima at
    q = +/- b."""

    kind = "quartic_double_well"
    polynomial_degree = 4

    def __init__(self, a=1.0, b=1.0):
        super().__init__(1)
        if a <= 0:
            raise GwpdError("double-well prefactor a must be positive")
        self.a = float(a)
        self.b = float(b)

    def _analytic(self, q, order):
        a, b2 = self.a, self.b ** 2
        x = q[0]
        if order == 0:
            return float(a * (x * x - b2) ** 2)
        table = {
            1: 4.0 * a * x * (x * x - b2),
            2: 4.0 * a * (3.0 * x * x - b2),
            3: 24.0 * a * x,
            4: 24.0 * a,
        }
        return np.full((1,) * order, table[order])

    def evaluate_many(self, points, order):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        x = points[:, 0]
        a, b2 = self.a, self.b ** 2
        table = {
            0: a * (x * x - b2) ** 2,
            1: 4.0 * a * x * (x * x - b2),
            2: 4.0 * a * (3.0 * x * x - b2),
            3: 24.0 * a * x,
            4: np.full_like(x, 24.0 * a),
        }
        vals = table[order]
        if order == 0:
            return vals
        return vals.reshape((-1,) + (1,) * order)


class PolynomialPotential(PotentialModel):
    """Polynomial of degree <= 4 given by totally symmetric coefficient
    tensors:

        V(q) = c0 + c1.q + q.c2.q/2 + c3:qqq/3! + c4::qqqq/4!.
    """

    kind = "polynomial"

    def __init__(self, dim, c0=0.0, c1=None, c2=None, c3=None, c4=None):
        super().__init__(dim)
        d = self.dim
        self.c0 = float(c0)
        self.c1 = np.zeros(d) if c1 is None else np.asarray(c1, dtype=float).reshape(d)
        self.c2 = np.zeros((d, d)) if c2 is None else np.asarray(c2, dtype=float).reshape(d, d)
        self.c3 = np.zeros((d,) * 3) if c3 is None else np.asarray(c3, dtype=float).reshape((d,) * 3)
        self.c4 = np.zeros((d,) * 4) if c4 is None else np.asarray(c4, dtype=float).reshape((d,) * 4)
        for name in ("c2", "c3", "c4"):
            t = getattr(self, name)
            sym = _symmetrize_tensor(t)
            if np.max(np.abs(t - sym)) > 1e-10 * max(np.max(np.abs(t)), 1.0):
                raise GwpdError(f"{name} must be a totally symmetric tensor")
            setattr(self, name, sym)
        degree = 4 if np.any(self.c4) else 3 if np.any(self.c3) else 2 if np.any(self.c2) \
            else 1 if np.any(self.c1) else 0
        self.polynomial_degree = degree

    def _analytic(self, q, order):
        c1, c2, c3, c4 = self.c1, self.c2, self.c3, self.c4
        if order == 0:
            return (self.c0 + c1 @ q + 0.5 * q @ c2 @ q
                    + np.einsum("ijk,i,j,k->", c3, q, q, q) / 6.0
                    + np.einsum("ijkl,i,j,k,l->", c4, q, q, q, q) / 24.0)
        if order == 1:
            return (c1 + c2 @ q + 0.5 * np.einsum("ijk,j,k->i", c3, q, q)
                    + np.einsum("ijkl,j,k,l->i", c4, q, q, q) / 6.0)
        if order == 2:
            return (c2 + np.einsum("ijk,k->ij", c3, q)
                    + 0.5 * np.einsum("ijkl,k,l->ij", c4, q, q))
        if order == 3:
            return c3 + np.einsum("ijkl,l->ijk", c4, q)
        return c4.copy()

    def evaluate_many(self, points, order):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        c1, c2, c3, c4 = self.c1, self.c2, self.c3, self.c4
        if order == 0:
            return (self.c0 + pts @ c1 + 0.5 * np.einsum("ni,ij,nj->n", pts, c2, pts)
                    + np.einsum("ijk,ni,nj,nk->n", c3, pts, pts, pts) / 6.0
                    + np.einsum("ijkl,ni,nj,nk,nl->n", c4, pts, pts, pts, pts) / 24.0)
        if order == 1:
            return (c1[None, :] + pts @ c2.T
                    + 0.5 * np.einsum("ijk,nj,nk->ni", c3, pts, pts)
                    + np.einsum("ijkl,nj,nk,nl->ni", c4, pts, pts, pts) / 6.0)
        if order == 2:
            return (c2[None] + np.einsum("ijk,nk->nij", c3, pts)
                    + 0.5 * np.einsum("ijkl,nk,nl->nij", c4, pts, pts))
        return super().evaluate_many(points, order)


class TabulatedPotential(PotentialModel):
    """One-dimensional potential interpolated from (q, V) samples with a
    cubic spline; derivatives beyond order 2 use finite differences."""

    kind = "user_table"
    max_analytic_order = 2

    def __init__(self, q_values, v_values):
        from scipy.interpolate import CubicSpline

        super().__init__(1)
        q_values = np.asarray(q_values, dtype=float)
        v_values = np.asarray(v_values, dtype=float)
        if q_values.ndim != 1 or q_values.shape != v_values.shape or q_values.size < 4:
            raise GwpdError("tabulated potential needs matching 1-D arrays with >= 4 samples")
        order = np.argsort(q_values)
        self._spline = CubicSpline(q_values[order], v_values[order])

    def _analytic(self, q, order):
        val = float(self._spline(q[0], nu=order))
        if order == 0:
            return val
        return np.full((1,) * order, val)


_KINDS = {
    "harmonic": HarmonicPotential,
    "morse": MorsePotential,
    "quartic_double_well": QuarticDoubleWellPotential,
    "polynomial": PolynomialPotential,
    "user_table": TabulatedPotential,
}


def build_potential(kind, **params):
    """Construct a model by kind name; used by the config layer."""
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise GwpdError(f"unknown potential kind {kind!r}; choose from {sorted(_KINDS)}") from None
    return cls(**params)


def evaluate(model, q, order):
    """Derivative tensor of ``model`` at q (module-level convenience)."""
    return model.evaluate(q, order)


def finite_difference_tensor(model, q, order, step=None, richardson=True):
    """Totally symmetric third or fourth derivative tensor by central
    differences of the highest analytic derivative.

    Differences of order ``order - k`` are taken when the model supplies
    analytic derivatives up to ``order - k`` (k = 1 or 2).  The result is
    symmetrized over all index permutations; with ``richardson`` the h and
    h/2 evaluations are combined to cancel the O(h^2) truncation term.
    """
    if order not in (3, 4):
        raise GwpdError("finite differences are provided for orders 3 and 4 only")
    if step is None:
        step = FD_STEPS[order]
    if step <= 0:
        raise GwpdError("finite-difference step must be positive")
    base = min(model.max_analytic_order, order - 1)
    if base < order - 2:
        raise GwpdError(f"model supports analytic order {model.max_analytic_order}; "
                        f"cannot build order {order} by differencing")
    q = np.atleast_1d(np.asarray(q, dtype=float))
    dim = model.dim

    def one_sided(h):
        if base == order - 1:
            # first difference of the rank-(order-1) tensor along each axis
            t = np.zeros((dim,) * order)
            for k in range(dim):
                e = np.zeros(dim)
                e[k] = h
                t[..., k] = (model.evaluate(q + e, base) - model.evaluate(q - e, base)) / (2.0 * h)
            return t
        # second mixed difference of the rank-(order-2) tensor
        t = np.zeros((dim,) * order)
        for k in range(dim):
            ek = np.zeros(dim)
            ek[k] = h
            for l in range(dim):
                el = np.zeros(dim)
                el[l] = h
                t[..., k, l] = (model.evaluate(q + ek + el, base)
                                - model.evaluate(q + ek - el, base)
                                - model.evaluate(q - ek + el, base)
                                + model.evaluate(q - ek - el, base)) / (4.0 * h * h)
        return t

    coarse = one_sided(step)
    if richardson:
        fine = one_sided(0.5 * step)
        coarse = (4.0 * fine - coarse) / 3.0
    return _symmetrize_tensor(coarse)


class ExpectationEngine:
    """Tensor-product Gauss-Hermite quadrature over a Gaussian density.

    Parameters
    ----------
    order : int
        Nodes per dimension; exact for integrand polynomials of degree
        <= 2*order - 1.
    """

    def __init__(self, order=16):
        if order < 1 or int(order) != order:
            raise GwpdError("quadrature order must be a positive integer")
        self.order = int(order)
        self._nodes1d = np.polynomial.hermite.hermgauss(self.order)
        self._grids = {}       # dim -> (U (N, dim), w (N,))
        self._sqrt_cache = None  # (sigma bytes, transform)

    def _grid(self, dim):
        if dim not in self._grids:
            x, w = self._nodes1d
            axes = np.meshgrid(*([x] * dim), indexing="ij")
            u = np.stack([a.ravel() for a in axes], axis=-1)
            weights = np.ones(u.shape[0])
            wa = np.meshgrid(*([w] * dim), indexing="ij")
            for a in wa:
                weights = weights * a.ravel()
            self._grids[dim] = (u, weights / np.pi ** (dim / 2.0))
        return self._grids[dim]

    def _sqrt_sigma(self, sigma):
        key = sigma.tobytes()
        if self._sqrt_cache is not None and self._sqrt_cache[0] == key:
            return self._sqrt_cache[1]
        if sigma.shape == (1, 1):
            if sigma[0, 0] <= 0:
                raise InvalidStateError("position covariance must be positive definite")
            root = np.sqrt(sigma)
        else:
            vals, vecs = np.linalg.eigh(sigma)
            if vals[0] <= 0:
                raise InvalidStateError("position covariance must be positive definite")
            root = (vecs * np.sqrt(vals)) @ vecs.T
        self._sqrt_cache = (key, root)
        return root

    def nodes_weights(self, mean, sigma):
        """Quadrature nodes (N, D) and weights (N,) for N(mean, sigma);
        weights sum to one."""
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        u, w = self._grid(mean.shape[0])
        pts = mean[None, :] + np.sqrt(2.0) * (u @ self._sqrt_sigma(sigma).T)
        return pts, w

    def expectation(self, model, mean, sigma, order):
        """<V^(order)> over N(mean, sigma) by quadrature."""
        pts, w = self.nodes_weights(mean, sigma)
        vals = model.evaluate_many(pts, order)
        if order == 0:
            return float(w @ vals)
        return np.tensordot(w, vals, axes=(0, 0))


def _moment_expectation(model, mean, sigma, order):
    # exact for polynomial degree <= 4: Taylor tensors at the mean plus
    # Gaussian central moments <x x> = Sigma, <xxxx> -> 3 Sigma Sigma
    d = [model.evaluate(mean, j) for j in range(5)]
    if order == 0:
        return (d[0] + 0.5 * np.trace(d[2] @ sigma)
                + np.einsum("ijkl,ij,kl->", d[4], sigma, sigma) / 8.0)
    if order == 1:
        return d[1] + 0.5 * np.einsum("ijk,jk->i", d[3], sigma)
    return d[2] + 0.5 * np.einsum("ijkl,kl->ij", d[4], sigma)


def gaussian_expectation(model, state, order, engine, setup, force_quadrature=False):
    """Expectation value <V^(order)> in the given wavepacket state.

    Exact moment formulas are used when the model is a polynomial of degree
    <= 4; otherwise the engine's Gauss-Hermite rule is applied after the
    affine transform to the state's position covariance.
    ``force_quadrature`` bypasses the moment shortcut (a warning flags
    quadrature orders too low for the model's polynomial degree).
    """
    if order not in (0, 1, 2):
        raise GwpdError("gaussian_expectation supports orders 0..2")
    sigma = position_covariance(state, setup)
    return gaussian_expectation_at(model, state.q, sigma, order, engine,
                                   force_quadrature=force_quadrature)


def gaussian_expectation_at(model, mean, sigma, order, engine, force_quadrature=False):
    """Same as :func:`gaussian_expectation` but parametrization-free: takes
    the density's mean and covariance directly."""
    deg = model.polynomial_degree
    if deg is not None and deg <= 4 and not force_quadrature:
        return _moment_expectation(model, mean, sigma, order)
    if deg is not None and deg - order > 2 * engine.order - 1:
        warnings.warn(
            f"quadrature order {engine.order} is not exact for polynomial degree {deg}",
            QuadratureOrderWarning, stacklevel=2)
    return engine.expectation(model, mean, sigma, order)
