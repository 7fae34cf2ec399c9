"""Exact kinetic/potential sub-flows and their symmetric compositions.

The effective Hamiltonian splits into a kinetic part T(p) and a quadratic
potential part V_eff(x).  Both sub-flows are exactly solvable:

kinetic (width matrix follows the free-particle Riccati solution)

    q <- q + t m^{-1} p
    A <- A (Id + t m^{-1} A)^{-1}
    gamma <- gamma + t T(p) + (i hbar/2) logdet(Id + t m^{-1} A)

potential (coefficients are constant during the sub-flow because they depend
on the state only through q and Im A, neither of which it changes)

    p <- p - t V1,   A <- A - t V2,   gamma <- gamma - t V0.

In the frozen-width mode the kinetic flow keeps A fixed and the log-det term
is replaced by its purely imaginary-width value -t (hbar/2) Tr(m^{-1} Im A);
the potential flow skips the A update.

Single steps are composed as TV / VT (first order), TVT / VTV (symmetric,
second order) and even-order symmetric compositions of the second-order
kernels.  Composition weights:

* triple jump: order 2k+2 from order 2k via S(x1 dt) S(x0 dt) S(x1 dt) with
  x1 = 1/(2 - 2^{1/(2k+1)}), x0 = 1 - 2 x1;
* five-stage fractal: S(s dt)^2 S((1-4s) dt) S(s dt)^2 with
  s = 1/(4 - 4^{1/(2k+1)});
* a nine-stage optimized order-6 palindrome, available behind
  ``composition="kahan_li"``.

All sub-flows are exactly invertible (the same closed forms hold for
negative t), which makes every composed scheme time-reversible in exact
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import GaussianHagedorn, GaussianHeller, symmetrize
from .errors import BranchCrossingError, InvalidStateError, MethodConstraintError, NumericalError

__all__ = [
    "SchemeSpec",
    "Trajectory",
    "composition_weights",
    "kinetic_step_heller",
    "potential_step_heller",
    "kinetic_step_hagedorn",
    "potential_step_hagedorn",
    "step",
    "propagate",
    "reverse_roundtrip",
]

_BASES = ("TV", "VT", "TVT", "VTV")

# nine-stage palindromic order-6 composition (optimized, non-recursive)
_KAHAN_LI_6 = (
    0.39216144400731413928,
    0.33259913678935943860,
    -0.70624617255763935981,
    0.08221359629355080023,
    0.79854399093482996340,
    0.08221359629355080023,
    -0.70624617255763935981,
    0.33259913678935943860,
    0.39216144400731413928,
)


@dataclass(frozen=True)
class SchemeSpec:
    """Integration scheme: base splitting, accuracy order, composition
    family, time step and step count."""

    base: str
    dt: float
    steps: int
    order: int = 2
    composition: str = "triple_jump"

    def __post_init__(self):
        base = self.base.upper()
        object.__setattr__(self, "base", base)
        if base not in _BASES:
            raise NumericalError(f"unknown base scheme {self.base!r}; choose from {_BASES}")
        if self.order == 1:
            if base not in ("TV", "VT"):
                raise NumericalError("order 1 is only available with the TV/VT bases")
        elif self.order == 2 or (self.order >= 4 and self.order % 2 == 0):
            if self.order >= 2 and base not in ("TVT", "VTV"):
                raise NumericalError("orders >= 2 require a symmetric base (TVT or VTV)")
        else:
            raise NumericalError(f"unsupported order {self.order}")
        if self.composition not in ("triple_jump", "suzuki_fractal", "kahan_li"):
            raise NumericalError(f"unknown composition {self.composition!r}")
        if not self.dt > 0:
            raise NumericalError("dt must be positive")
        if self.steps < 0 or int(self.steps) != self.steps:
            raise NumericalError("steps must be a nonnegative integer")
        composition_weights(self.order, self.composition)  # fail early


def composition_weights(order, composition="triple_jump"):
    """Substep fractions applied to the symmetric second-order kernel."""
    if order in (1, 2):
        return (1.0,)
    if order % 2 or order < 2:
        raise NumericalError(f"composition order must be even, got {order}")
    if composition == "kahan_li":
        if order != 6:
            raise NumericalError("the optimized kahan_li composition is order 6 only")
        return _KAHAN_LI_6
    weights = (1.0,)
    for k in range(1, order // 2):
        if composition == "triple_jump":
            x1 = 1.0 / (2.0 - 2.0 ** (1.0 / (2 * k + 1)))
            outer = (x1, 1.0 - 2.0 * x1, x1)
        else:  # suzuki_fractal
            s = 1.0 / (4.0 - 4.0 ** (1.0 / (2 * k + 1)))
            outer = (s, s, 1.0 - 4.0 * s, s, s)
        weights = tuple(c * w for c in outer for w in weights)
    return weights


# ---------------------------------------------------------------------------
# raw sub-flows (tuples of plain arrays; validation happens per full step)
# ---------------------------------------------------------------------------


def _logdet_rhp(mat):
    """log det for a complex matrix whose eigenvalues lie in the open right
    half-plane; per-eigenvalue principal logs sum to the continuous branch."""
    if mat.shape == (1, 1):
        lam = complex(mat[0, 0])
        if lam.real <= 0.0:
            raise BranchCrossingError(
                "kinetic flow crossed the log-determinant branch cut; reduce the time step")
        return np.log(lam)
    lams = np.linalg.eigvals(mat)
    if np.min(lams.real) <= 0.0:
        raise BranchCrossingError(
            "kinetic flow crossed the log-determinant branch cut; reduce the time step")
    return complex(np.sum(np.log(lams)))


def _kin_heller(vals, t, setup, frozen):
    q, p, a, gamma = vals
    minv = setup.mass_inv
    q = q + t * (minv @ p)
    t_kin = 0.5 * (p @ minv @ p)
    if frozen:
        gamma = gamma + t * (t_kin - 0.5 * setup.hbar * np.trace(minv @ a.imag))
        return q, p, a, gamma
    mat = np.eye(a.shape[0]) + t * (minv @ a)
    try:
        a_new = symmetrize(a @ np.linalg.inv(mat))
    except np.linalg.LinAlgError as exc:
        raise BranchCrossingError("singular kinetic update; reduce the time step") from exc
    gamma = gamma + t * t_kin + 0.5j * setup.hbar * _logdet_rhp(mat)
    return q, p, a_new, gamma


def _pot_heller(vals, t, coeffs, frozen):
    q, p, a, gamma = vals
    p = p - t * coeffs.v1
    if not frozen:
        a = a - t * coeffs.v2
    return q, p, a, gamma - t * coeffs.v0


def _kin_hagedorn(vals, t, setup):
    q, p, qq, pp, s, branch, det_arg = vals
    minv = setup.mass_inv
    q = q + t * (minv @ p)
    qq = qq + t * (minv @ pp)
    s = s + t * 0.5 * (p @ minv @ p)
    det = complex(qq[0, 0]) if qq.shape == (1, 1) else np.linalg.det(qq)
    arg = np.angle(det)
    delta = arg - det_arg
    if delta > np.pi:
        branch -= 1
    elif delta < -np.pi:
        branch += 1
    return q, p, qq, pp, s, branch, arg


def _pot_hagedorn(vals, t, coeffs):
    q, p, qq, pp, s, branch, det_arg = vals
    p = p - t * coeffs.v1
    pp = pp - t * (coeffs.v2 @ qq)
    return q, p, qq, pp, s - t * coeffs.v0, branch, det_arg


def _im_a_of_q(qq):
    if qq.shape == (1, 1):
        return np.array([[1.0 / (qq[0, 0] * np.conj(qq[0, 0])).real]])
    return symmetrize(np.linalg.inv((qq @ qq.conj().T).real))


def _base_step_heller(vals, dt, base, method, setup, frozen):
    if base == "TV":
        vals = _kin_heller(vals, dt, setup, frozen)
        c = method.coefficients_at(vals[0], np.ascontiguousarray(vals[2].imag))
        return _pot_heller(vals, dt, c, frozen)
    if base == "VT":
        c = method.coefficients_at(vals[0], np.ascontiguousarray(vals[2].imag))
        vals = _pot_heller(vals, dt, c, frozen)
        return _kin_heller(vals, dt, setup, frozen)
    if base == "TVT":
        vals = _kin_heller(vals, 0.5 * dt, setup, frozen)
        c = method.coefficients_at(vals[0], np.ascontiguousarray(vals[2].imag))
        vals = _pot_heller(vals, dt, c, frozen)
        return _kin_heller(vals, 0.5 * dt, setup, frozen)
    # VTV
    c = method.coefficients_at(vals[0], np.ascontiguousarray(vals[2].imag))
    vals = _pot_heller(vals, 0.5 * dt, c, frozen)
    vals = _kin_heller(vals, dt, setup, frozen)
    c = method.coefficients_at(vals[0], np.ascontiguousarray(vals[2].imag))
    return _pot_heller(vals, 0.5 * dt, c, frozen)


def _base_step_hagedorn(vals, dt, base, method, setup):
    if base == "TV":
        vals = _kin_hagedorn(vals, dt, setup)
        c = method.coefficients_at(vals[0], _im_a_of_q(vals[2]))
        return _pot_hagedorn(vals, dt, c)
    if base == "VT":
        c = method.coefficients_at(vals[0], _im_a_of_q(vals[2]))
        vals = _pot_hagedorn(vals, dt, c)
        return _kin_hagedorn(vals, dt, setup)
    if base == "TVT":
        vals = _kin_hagedorn(vals, 0.5 * dt, setup)
        c = method.coefficients_at(vals[0], _im_a_of_q(vals[2]))
        vals = _pot_hagedorn(vals, dt, c)
        return _kin_hagedorn(vals, 0.5 * dt, setup)
    c = method.coefficients_at(vals[0], _im_a_of_q(vals[2]))
    vals = _pot_hagedorn(vals, 0.5 * dt, c)
    vals = _kin_hagedorn(vals, dt, setup)
    c = method.coefficients_at(vals[0], _im_a_of_q(vals[2]))
    return _pot_hagedorn(vals, 0.5 * dt, c)


def _validate_heller_raw(vals):
    q, p, a, gamma = vals
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))
            and np.all(np.isfinite(a)) and np.isfinite(gamma)):
        raise NumericalError("non-finite wavepacket parameters")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > 1e-12 * max(scale, 1.0):
        raise InvalidStateError("width matrix lost symmetry")
    b = a.imag
    min_eig = b[0, 0] if b.shape == (1, 1) else np.linalg.eigvalsh(symmetrize(b))[0]
    if min_eig <= 1e-12:
        raise InvalidStateError("Im A lost positive definiteness")


def _validate_hagedorn_raw(vals):
    q, p, qq, pp, s, branch, _ = vals
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))
            and np.all(np.isfinite(qq)) and np.all(np.isfinite(pp)) and np.isfinite(s)):
        raise NumericalError("non-finite wavepacket parameters")
    c1 = qq.T @ pp - pp.T @ qq
    c2 = qq.conj().T @ pp - pp.conj().T @ qq - 2j * np.eye(qq.shape[0])
    if max(np.max(np.abs(c1)), np.max(np.abs(c2))) > 1e-10:
        raise InvalidStateError("Q/P symplecticity relations drifted beyond tolerance")


# ---------------------------------------------------------------------------
# public single sub-flows (validated states in and out)
# ---------------------------------------------------------------------------


def kinetic_step_heller(state, t, setup, frozen=False):
    """Exact free-motion flow for a signed duration t."""
    vals = _kin_heller((state.q, state.p, state.A, state.gamma), t, setup, frozen)
    return GaussianHeller(*vals)


def potential_step_heller(state, t, coeffs, frozen=False):
    """Exact quadratic-potential flow for a signed duration t."""
    vals = _pot_heller((state.q, state.p, state.A, state.gamma), t, coeffs, frozen)
    return GaussianHeller(*vals)


def kinetic_step_hagedorn(state, t, setup):
    det = complex(state.Q[0, 0]) if state.dim == 1 else np.linalg.det(state.Q)
    vals = _kin_hagedorn((state.q, state.p, state.Q, state.P, state.S,
                          state.branch, np.angle(det)), t, setup)
    return GaussianHagedorn(*vals[:6])


def potential_step_hagedorn(state, t, coeffs):
    vals = _pot_hagedorn((state.q, state.p, state.Q, state.P, state.S,
                          state.branch, 0.0), t, coeffs)
    return GaussianHagedorn(*vals[:6])


# ---------------------------------------------------------------------------
# full steps and the propagation driver
# ---------------------------------------------------------------------------


def _state_to_raw(state):
    if isinstance(state, GaussianHagedorn):
        det = complex(state.Q[0, 0]) if state.dim == 1 else np.linalg.det(state.Q)
        return (state.q, state.p, state.Q, state.P, state.S, state.branch, np.angle(det))
    return (state.q, state.p, state.A, state.gamma)


def _raw_to_state(vals, hagedorn):
    if hagedorn:
        return GaussianHagedorn._unchecked(vals[0], vals[1], vals[2], vals[3],
                                           vals[4], vals[5])
    return GaussianHeller._unchecked(*vals)


def _step_raw(vals, dt, scheme, method, setup, hagedorn):
    weights = composition_weights(scheme.order, scheme.composition)
    if hagedorn:
        for w in weights:
            vals = _base_step_hagedorn(vals, w * dt, scheme.base, method, setup)
    else:
        frozen = method.frozen
        for w in weights:
            vals = _base_step_heller(vals, w * dt, scheme.base, method, setup, frozen)
    return vals


def step(state, scheme, method, dt=None):
    """One full step of the scheme (dt overrides scheme.dt, sign included)."""
    setup = method.setup
    hagedorn = isinstance(state, GaussianHagedorn)
    if hagedorn and method.frozen:
        raise MethodConstraintError(
            "frozen-width methods are defined in the center/width parametrization only")
    if not hagedorn and method.frozen:
        method.coefficients(state)  # enforces Re A = 0 once per entry state
    vals = _step_raw(_state_to_raw(state), scheme.dt if dt is None else dt,
                     scheme, method, setup, hagedorn)
    if hagedorn:
        _validate_hagedorn_raw(vals)
    else:
        _validate_heller_raw(vals)
    return _raw_to_state(vals, hagedorn)


@dataclass
class Trajectory:
    """Recorded propagation: uniformly spaced times, states and (optionally)
    per-record diagnostics."""

    times: np.ndarray
    states: list
    diagnostics: Optional[list] = None

    def __len__(self):
        return len(self.states)


def propagate(initial, scheme, method, record_every=1, diagnostics=True,
              renormalize_every=None):
    """Propagate ``scheme.steps`` steps, recording every ``record_every``-th
    state (the initial and final states are always included).

    Re-normalization is off by default; the flow conserves the norm
    analytically.  A mid-run invariant violation aborts with the step index.
    """
    from . import diagnostics as diag

    setup = method.setup
    hagedorn = isinstance(initial, GaussianHagedorn)
    if hagedorn and method.frozen:
        raise MethodConstraintError(
            "frozen-width methods are defined in the center/width parametrization only")
    if not hagedorn and method.frozen:
        method.coefficients(initial)
    vals = _state_to_raw(initial)
    times = [0.0]
    states = [initial]
    records = [diag.record(initial, method, 0.0)] if diagnostics else None
    dt = scheme.dt
    for k in range(1, scheme.steps + 1):
        try:
            vals = _step_raw(vals, dt, scheme, method, setup, hagedorn)
            if hagedorn:
                _validate_hagedorn_raw(vals)
            else:
                _validate_heller_raw(vals)
        except (InvalidStateError, NumericalError) as exc:
            raise NumericalError(str(exc), step=k) from exc
        if renormalize_every and k % renormalize_every == 0 and not hagedorn:
            from .core import normalize_initial

            state = normalize_initial(_raw_to_state(vals, hagedorn), setup)
            vals = _state_to_raw(state)
        if k % record_every == 0 or k == scheme.steps:
            state = _raw_to_state(vals, hagedorn)
            times.append(k * dt)
            states.append(state)
            if diagnostics:
                records.append(diag.record(state, method, k * dt))
    return Trajectory(np.asarray(times), states, records)


_ADJOINT_BASE = {"TV": "VT", "VT": "TV", "TVT": "TVT", "VTV": "VTV"}


def reverse_roundtrip(initial, scheme, method, steps=None):
    """Propagate forward then backward; returns the worst parameter residual.

    The backward leg runs the adjoint scheme with negated dt (sub-flow order
    reversed; identical to the forward scheme for the symmetric bases), which
    composes the exact inverses of the exact sub-flows.  The residual
    therefore measures reversibility up to rounding noise for every scheme.
    """
    setup = method.setup
    hagedorn = isinstance(initial, GaussianHagedorn)
    if hagedorn and method.frozen:
        raise MethodConstraintError(
            "frozen-width methods are defined in the center/width parametrization only")
    n = scheme.steps if steps is None else steps
    back = SchemeSpec(base=_ADJOINT_BASE[scheme.base], dt=scheme.dt, steps=scheme.steps,
                      order=scheme.order, composition=scheme.composition)
    vals = _state_to_raw(initial)
    for sgn, sch in ((1.0, scheme), (-1.0, back)):
        for _ in range(n):
            vals = _step_raw(vals, sgn * sch.dt, sch, method, setup, hagedorn)
    if hagedorn:
        resid = max(
            np.max(np.abs(vals[0] - initial.q)), np.max(np.abs(vals[1] - initial.p)),
            np.max(np.abs(vals[2] - initial.Q)), np.max(np.abs(vals[3] - initial.P)),
            abs(vals[4] - initial.S))
    else:
        resid = max(
            np.max(np.abs(vals[0] - initial.q)), np.max(np.abs(vals[1] - initial.p)),
            np.max(np.abs(vals[2] - initial.A)), abs(vals[3] - initial.gamma))
    return float(resid)
