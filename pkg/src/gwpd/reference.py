"""Grid-based reference propagation and closed-form oracles.

The grid oracle integrates the linear Schroedinger equation with a
second-order split-operator scheme: the potential factor acts pointwise in
position space, the kinetic factor acts diagonally in the discrete Fourier
basis.  It serves as the accuracy yardstick for the wavepacket methods
(1 and 2 dimensions).

``quadratic_exact_state`` evolves a wavepacket under an exactly quadratic
potential in closed form (matrix exponential of the linearized flow plus the
log-determinant phase), independent of the split-step machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import GaussianHeller
from .errors import GwpdError, NumericalError

__all__ = [
    "GridSpec",
    "grid_axes",
    "grid_volume",
    "sample_gaussian_on_grid",
    "grid_norm",
    "grid_inner",
    "grid_propagate",
    "fidelity_series",
    "quadratic_exact_state",
    "dump_frames",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid: per-dimension bounds and point counts plus the
    oracle's time step."""

    bounds: tuple
    points: tuple
    dt: float
    steps: int

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        points = tuple(int(n) for n in np.atleast_1d(self.points))
        if len(bounds) != len(points):
            raise GwpdError("bounds and points must have one entry per dimension")
        for lo, hi in bounds:
            if not hi > lo:
                raise GwpdError("each bound must satisfy max > min")
        for n in points:
            if n < 64 or (n & (n - 1)) != 0:
                raise GwpdError("points per dimension must be a power of two >= 64")
        if not self.dt > 0:
            raise GwpdError("dt must be positive")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def dim(self):
        return len(self.points)


def grid_axes(spec):
    """Per-dimension coordinate arrays (endpoint excluded, FFT convention)."""
    axes = []
    for (lo, hi), n in zip(spec.bounds, spec.points):
        axes.append(lo + (hi - lo) * np.arange(n) / n)
    return axes


def grid_volume(spec):
    dv = 1.0
    for (lo, hi), n in zip(spec.bounds, spec.points):
        dv *= (hi - lo) / n
    return dv


def _mesh(spec):
    return np.meshgrid(*grid_axes(spec), indexing="ij")


def sample_gaussian_on_grid(state, spec, setup):
    """Pointwise wavepacket values on the grid (either parametrization)."""
    mesh = _mesh(spec)
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    if isinstance(state, GaussianHeller):
        x = pts - state.q
        phase = (0.5 * np.einsum("ni,ij,nj->n", x, state.A, x)
                 + x @ state.p + state.gamma)
        vals = np.exp(1j * phase / setup.hbar)
    else:
        a = state.P @ np.linalg.inv(state.Q)
        x = pts - state.q
        phase = 0.5 * np.einsum("ni,ij,nj->n", x, a, x) + x @ state.p + state.S
        pref = (np.pi * setup.hbar) ** (-state.dim / 4.0) * np.exp(-0.5 * state.det_q_log())
        vals = pref * np.exp(1j * phase / setup.hbar)
    return vals.reshape(spec.points)


def grid_norm(psi, spec):
    return float(np.sqrt(np.sum(np.abs(psi) ** 2) * grid_volume(spec)))


def grid_inner(bra, ket, spec):
    return complex(np.sum(np.conj(bra) * ket) * grid_volume(spec))


def _edge_density(psi):
    dens = np.abs(psi) ** 2
    worst = 0.0
    for axis in range(dens.ndim):
        worst = max(worst, float(np.max(np.take(dens, 0, axis=axis))),
                    float(np.max(np.take(dens, -1, axis=axis))))
    return worst


def _kinetic_phase(spec, setup):
    ks = []
    for (lo, hi), n in zip(spec.bounds, spec.points):
        dx = (hi - lo) / n
        ks.append(2.0 * np.pi * np.fft.fftfreq(n, d=dx))
    mesh = np.meshgrid(*ks, indexing="ij")
    kin = np.zeros(spec.points)
    minv = setup.mass_inv
    for i in range(spec.dim):
        for j in range(spec.dim):
            kin = kin + 0.5 * setup.hbar ** 2 * minv[i, j] * mesh[i] * mesh[j]
    return kin


def grid_propagate(psi0, model, spec, setup, save_every=1):
    """Split-operator propagation of a gridded field.

    Returns (times, frames) with the initial frame included.  The run aborts
    if probability density reaches the grid edges (> 1e-6), and the initial
    frame must be both normalized and negligible at the boundary.
    """
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != spec.points:
        raise GwpdError(f"psi0 shape {psi.shape} does not match grid {spec.points}")
    if abs(grid_norm(psi, spec) - 1.0) > 1e-8:
        raise GwpdError("psi0 must be normalized on the grid")
    if _edge_density(psi) > 1e-12:
        raise GwpdError("grid too narrow: boundary density exceeds 1e-12 at t = 0")
    mesh = _mesh(spec)
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    v_vals = model.evaluate_many(pts, 0).reshape(spec.points)
    half_v = np.exp(-0.5j * v_vals * spec.dt / setup.hbar)
    full_t = np.exp(-1j * _kinetic_phase(spec, setup) * spec.dt / setup.hbar)
    times = [0.0]
    frames = [psi.copy()]
    for k in range(1, spec.steps + 1):
        psi = half_v * psi
        psi = np.fft.ifftn(full_t * np.fft.fftn(psi))
        psi = half_v * psi
        if k % save_every == 0 or k == spec.steps:
            if _edge_density(psi) > 1e-6:
                raise NumericalError("wavepacket reached the grid boundary", step=k)
            times.append(k * spec.dt)
            frames.append(psi.copy())
    return np.asarray(times), frames


def fidelity_series(states, frames, spec, setup):
    """|<grid frame | sampled wavepacket>|^2 for matched frames."""
    if len(states) != len(frames):
        raise GwpdError("state and frame sequences must have equal length")
    out = np.empty(len(frames))
    for i, (state, frame) in enumerate(zip(states, frames)):
        sampled = sample_gaussian_on_grid(state, spec, setup)
        out[i] = abs(grid_inner(frame, sampled, spec)) ** 2
    return out


def _logdet_continuous(mat):
    lams = np.linalg.eigvals(mat) if mat.shape != (1, 1) else np.array([mat[0, 0]])
    if np.min(lams.real) <= 0:
        raise NumericalError("oracle substep too long for the principal branch")
    return complex(np.sum(np.log(lams)))


def quadratic_exact_state(initial, hessian, t, setup, center=None, offset=0.0):
    """Closed-form evolution under V(q) = offset + (q-c)^T K (q-c)/2.

    The phase-space flow is the matrix exponential of [[0, m^{-1}], [-K, 0]];
    the width follows the linear-fractional update and the phase accumulates
    the classical action plus the continuous log-determinant.  The interval
    is cut into substeps short enough that every substep stays on the
    principal branch.
    """
    k_mat = np.atleast_2d(np.asarray(hessian, dtype=float))
    dim = initial.dim
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    omega_scale = np.sqrt(max(np.max(np.abs(np.linalg.eigvals(setup.mass_inv @ k_mat))), 1e-30))
    nsub = max(8, int(np.ceil(abs(t) * omega_scale / 0.2)))
    dt = t / nsub
    gen = np.zeros((2 * dim, 2 * dim))
    gen[:dim, dim:] = setup.mass_inv
    gen[dim:, :dim] = -k_mat
    m_step = expm(dt * gen)
    m11, m12 = m_step[:dim, :dim], m_step[:dim, dim:]
    m21, m22 = m_step[dim:, :dim], m_step[dim:, dim:]
    q = initial.q - c
    p = initial.p.copy()
    a = initial.A.copy()
    gamma = initial.gamma
    for _ in range(nsub):
        denom = m11 + m12 @ a
        action_old = 0.5 * (p @ q)
        q, p = m11 @ q + m12 @ p, m21 @ q + m22 @ p
        gamma = (gamma + 0.5 * (p @ q) - action_old - offset * dt
                 + 0.5j * setup.hbar * _logdet_continuous(denom))
        a = (m21 + m22 @ a) @ np.linalg.inv(denom)
        a = 0.5 * (a + a.T)
    return GaussianHeller(q + c, p, a, gamma)


def dump_frames(path, times, frames, spec):
    """Write frames as interleaved (re, im) float64 rows after a small text
    header (dimensions, bounds, dt)."""
    with open(path, "wb") as fh:
        header = ["gwpd-frames 1",
                  f"dim={spec.dim}",
                  "points=" + ",".join(str(n) for n in spec.points),
                  "bounds=" + ";".join(f"{lo},{hi}" for lo, hi in spec.bounds),
                  f"dt={spec.dt!r}",
                  f"frames={len(frames)}",
                  "#end"]
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        for frame in frames:
            flat = np.asarray(frame, dtype=complex).ravel()
            np.stack([flat.real, flat.imag], axis=-1).astype("<f8").tofile(fh)
