"""Effective-potential coefficients (V0, V1, V2) for the ten wavepacket
dynamics variants.

Every variant prescribes a quadratic effective potential

    V_eff(x) = V0 + V1 . x + x . V2 . x / 2,       x = q - q_t,

whose coefficients depend on the state only through the center q_t and the
width Im A_t.  Thawed variants let the width respond to V2; frozen variants
keep the width fixed, which forces V2 = B m^{-1} B with B = Im A_0.

Method ids
----------
tgwd_variational          V1 = <V'>, V2 = <V''>, V0 = <V> - Tr(<V''> Sigma)/2
tgwd_local_harmonic       second-order Taylor coefficients at q_t
tgwd_single_hessian       gradient at q_t, Hessian held at q_ref
tgwd_global_harmonic      second-order Taylor about fixed q_ref
tgwd_local_cubic_var      adds the third-derivative width correction to V1
tgwd_single_quartic_var   local cubic plus one fourth derivative at q_ref
fgwd_variational          V1 = <V'>, V0 = <V> - (hbar/4) Tr(m^{-1} B)
fgwd_classical_var        as above but V1 = V'(q_t) (classical force)
fgwd_local_harmonic       V0 = V(q_t), V1 = V'(q_t)
fgwd_global_harmonic      Taylor about q_ref with the frozen-width Hessian
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GaussianHagedorn, symmetrize
from .errors import GwpdError, MethodConstraintError
from .potentials import ExpectationEngine, gaussian_expectation_at

__all__ = [
    "METHOD_IDS",
    "EffectiveCoefficients",
    "MethodSpec",
    "Method",
    "bind",
    "coefficients",
]

METHOD_IDS = (
    "tgwd_variational",
    "tgwd_local_harmonic",
    "tgwd_single_hessian",
    "tgwd_global_harmonic",
    "tgwd_local_cubic_var",
    "tgwd_single_quartic_var",
    "fgwd_variational",
    "fgwd_classical_var",
    "fgwd_local_harmonic",
    "fgwd_global_harmonic",
)

_NEEDS_QREF = {"tgwd_single_hessian", "tgwd_global_harmonic",
               "tgwd_single_quartic_var", "fgwd_global_harmonic"}

FROZEN_RE_A_TOL = 1e-12


@dataclass(frozen=True)
class EffectiveCoefficients:
    """Quadratic effective-potential coefficients; V2 is kept real
    symmetric."""

    v0: float
    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        v1 = np.atleast_1d(np.asarray(self.v1))
        v2 = np.atleast_2d(np.asarray(self.v2))
        if np.iscomplexobj(v2):
            if np.max(np.abs(v2.imag)) > 1e-12 * max(np.max(np.abs(v2)), 1.0):
                raise GwpdError("V2 must be real")
            v2 = v2.real
        if np.iscomplexobj(v1):
            v1 = v1.real
        object.__setattr__(self, "v0", float(np.real(self.v0)))
        object.__setattr__(self, "v1", v1.astype(float))
        object.__setattr__(self, "v2", symmetrize(v2.astype(float)))
        if not (np.isfinite(self.v0) and np.all(np.isfinite(self.v1)) and np.all(np.isfinite(self.v2))):
            raise GwpdError("effective coefficients must be finite")


@dataclass(frozen=True)
class MethodSpec:
    """Method id plus the reference geometry for the single-reference
    variants (held as a tuple so specs stay hashable)."""

    id: str
    q_ref: tuple = None

    def __post_init__(self):
        if self.id not in METHOD_IDS:
            raise GwpdError(f"unknown method id {self.id!r}; choose from {METHOD_IDS}")
        if self.q_ref is not None:
            object.__setattr__(self, "q_ref", tuple(float(v) for v in np.atleast_1d(self.q_ref)))

    @property
    def frozen(self):
        return self.id.startswith("fgwd")


class Method:
    """A method spec bound to a potential model, quadrature engine and
    physical setup; reference-geometry tensors are evaluated once here.

    The coefficients depend on the state only through (q_t, Im A_t), which is
    what makes the potential sub-flow exactly solvable.
    """

    def __init__(self, spec, model, setup, engine=None, q_ref_default=None):
        if engine is None:
            engine = ExpectationEngine()
        self.spec = spec
        self.model = model
        self.setup = setup
        self.engine = engine
        if spec.q_ref is not None:
            self.q_ref = np.asarray(spec.q_ref, dtype=float)
        elif q_ref_default is not None:
            self.q_ref = np.asarray(q_ref_default, dtype=float).reshape(setup.dim)
        elif spec.id in _NEEDS_QREF:
            raise GwpdError(f"method {spec.id} needs a reference geometry q_ref")
        else:
            self.q_ref = None
        # single-reference data, computed once
        self._ref = {}
        if spec.id == "tgwd_single_hessian":
            self._ref["hess"] = model.evaluate(self.q_ref, 2)
        elif spec.id == "tgwd_global_harmonic":
            self._ref["v"] = model.evaluate(self.q_ref, 0)
            self._ref["grad"] = model.evaluate(self.q_ref, 1)
            self._ref["hess"] = model.evaluate(self.q_ref, 2)
        elif spec.id == "tgwd_single_quartic_var":
            self._ref["fourth"] = model.evaluate(self.q_ref, 4)
        elif spec.id == "fgwd_global_harmonic":
            self._ref["v"] = model.evaluate(self.q_ref, 0)
            self._ref["grad"] = model.evaluate(self.q_ref, 1)

    @property
    def frozen(self):
        return self.spec.frozen

    def coefficients(self, state):
        """Coefficients for the current state (either parametrization)."""
        if self.frozen and not isinstance(state, GaussianHagedorn):
            re_a = state.re_a
            if np.max(np.abs(re_a)) > FROZEN_RE_A_TOL * max(np.linalg.norm(state.A), 1.0):
                raise MethodConstraintError(
                    f"{self.spec.id} requires a purely imaginary width matrix (Re A = 0)")
        return self.coefficients_at(state.q, state.im_a)

    def coefficients_at(self, q, im_a):
        """Coefficients from the center and width only."""
        method = getattr(self, "_" + self.spec.id)
        return method(np.asarray(q, dtype=float), im_a)

    # -- helpers ---------------------------------------------------------

    def _sigma(self, im_a):
        if im_a.shape == (1, 1):
            return np.array([[0.5 * self.setup.hbar / im_a[0, 0]]])
        return symmetrize(0.5 * self.setup.hbar * np.linalg.inv(im_a))

    def _expect(self, order, q, sigma):
        return gaussian_expectation_at(self.model, q, sigma, order, self.engine)

    def _frozen_v2(self, im_a):
        v2 = im_a @ self.setup.mass_inv @ im_a
        return symmetrize(v2)

    # -- thawed variants ---------------------------------------------------

    def _tgwd_variational(self, q, im_a):
        sigma = self._sigma(im_a)
        v2 = self._expect(2, q, sigma)
        v1 = self._expect(1, q, sigma)
        v0 = self._expect(0, q, sigma) - 0.5 * np.trace(v2 @ sigma)
        return EffectiveCoefficients(v0, v1, v2)

    def _tgwd_local_harmonic(self, q, im_a):
        return EffectiveCoefficients(self.model.evaluate(q, 0),
                                     self.model.evaluate(q, 1),
                                     self.model.evaluate(q, 2))

    def _tgwd_single_hessian(self, q, im_a):
        return EffectiveCoefficients(self.model.evaluate(q, 0),
                                     self.model.evaluate(q, 1),
                                     self._ref["hess"])

    def _tgwd_global_harmonic(self, q, im_a):
        d = q - self.q_ref
        hess = self._ref["hess"]
        v0 = self._ref["v"] + self._ref["grad"] @ d + 0.5 * d @ hess @ d
        v1 = self._ref["grad"] + hess @ d
        return EffectiveCoefficients(v0, v1, hess)

    def _tgwd_local_cubic_var(self, q, im_a):
        sigma = self._sigma(im_a)
        third = self.model.evaluate(q, 3)
        v1 = self.model.evaluate(q, 1) + 0.5 * np.einsum("ijk,jk->i", third, sigma)
        return EffectiveCoefficients(self.model.evaluate(q, 0), v1, self.model.evaluate(q, 2))

    def _tgwd_single_quartic_var(self, q, im_a):
        sigma = self._sigma(im_a)
        third = self.model.evaluate(q, 3)
        fourth = self._ref["fourth"]
        v2 = self.model.evaluate(q, 2) + 0.5 * np.einsum("ijkl,kl->ij", fourth, sigma)
        v1 = self.model.evaluate(q, 1) + 0.5 * np.einsum("ijk,jk->i", third, sigma)
        v0 = self.model.evaluate(q, 0) - np.einsum("ijkl,ij,kl->", fourth, sigma, sigma) / 8.0
        return EffectiveCoefficients(v0, v1, v2)

    # -- frozen variants ---------------------------------------------------

    def _zero_point(self, im_a):
        return 0.25 * self.setup.hbar * np.trace(self.setup.mass_inv @ im_a)

    def _fgwd_variational(self, q, im_a):
        sigma = self._sigma(im_a)
        v0 = self._expect(0, q, sigma) - self._zero_point(im_a)
        return EffectiveCoefficients(v0, self._expect(1, q, sigma), self._frozen_v2(im_a))

    def _fgwd_classical_var(self, q, im_a):
        sigma = self._sigma(im_a)
        v0 = self._expect(0, q, sigma) - self._zero_point(im_a)
        return EffectiveCoefficients(v0, self.model.evaluate(q, 1), self._frozen_v2(im_a))

    def _fgwd_local_harmonic(self, q, im_a):
        return EffectiveCoefficients(self.model.evaluate(q, 0),
                                     self.model.evaluate(q, 1),
                                     self._frozen_v2(im_a))

    def _fgwd_global_harmonic(self, q, im_a):
        v2 = self._frozen_v2(im_a)
        d = q - self.q_ref
        v0 = self._ref["v"] + self._ref["grad"] @ d + 0.5 * d @ v2 @ d
        v1 = self._ref["grad"] + v2 @ d
        return EffectiveCoefficients(v0, v1, v2)


def bind(spec, model, setup, engine=None, q_ref_default=None):
    """Bind a method spec to a model/setup (resolving q_ref) for repeated
    coefficient evaluation."""
    return Method(spec, model, setup, engine=engine, q_ref_default=q_ref_default)


def coefficients(spec, state, model, engine, setup):
    """One-shot coefficient evaluation for a state (spec-level dispatch).

    For the single-reference variants without an explicit q_ref the current
    center is used, matching the convention that the reference defaults to
    the initial geometry.
    """
    return Method(spec, model, setup, engine=engine,
                  q_ref_default=state.q).coefficients(state)
