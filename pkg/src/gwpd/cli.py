"""Config-driven command line interface.

Subcommands
-----------
run           propagate and write trajectory.csv + summary.json
converge      repeat the run over a dt list, write convergence.csv
reverse       forward/backward round trip, write summary.json
compare-grid  propagate alongside the grid oracle, write fidelity.csv
list-methods  list method ids; --emit-coeffs / --emit-potential emit JSON
              used by external plotting tools

Exit codes: 0 success, 2 configuration error, 3 numerical failure.

Config format (INI-style sections, strict keys; unknown keys are rejected):

    [setup]      dim, hbar, mass
    [potential]  kind = harmonic | morse | quartic_double_well |
                 polynomial | user_table, plus kind parameters
                 (harmonic: hessian, center, offset; morse: d_e, a, q_e;
                 quartic_double_well: a, b; polynomial: c0..c4 row-major;
                 user_table: file or q_values/v_values)
    [method]     id, q_ref (defaults to the initial center)
    [scheme]     base, order, composition, dt, steps, parametrization
    [initial]    q0, p0, and either re_a0/im_a0 (+ gamma_re, gamma_im or
                 auto_normalize) or re_q0/im_q0/re_p0/im_p0/s0
    [output]     directory, save_every
    [grid]       points, bounds_min, bounds_max, save_every, dump_frames
                 (compare-grid only)

Vectors are comma- or space-separated floats; matrices take 1 entry
(scalar * Id), D entries (diagonal) or D*D entries (row-major).
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .core import (GaussianHagedorn, GaussianHeller, PhysicalSetup,
                   normalize_initial)
from .errors import ConfigError, GwpdError, NumericalError
from .integrators import SchemeSpec, propagate, reverse_roundtrip
from .methods import METHOD_IDS, MethodSpec, bind
from .potentials import ExpectationEngine, build_potential
from .reference import GridSpec, fidelity_series, grid_propagate, dump_frames, sample_gaussian_on_grid

_SECTION_KEYS = {
    "setup": {"dim", "hbar", "mass"},
    "potential": {"kind", "hessian", "center", "offset", "d_e", "a", "q_e", "b",
                  "c0", "c1", "c2", "c3", "c4", "file", "q_values", "v_values"},
    "method": {"id", "q_ref"},
    "scheme": {"base", "order", "composition", "dt", "steps", "parametrization"},
    "initial": {"q0", "p0", "re_a0", "im_a0", "gamma_re", "gamma_im",
                "auto_normalize", "re_q0", "im_q0", "re_p0", "im_p0", "s0"},
    "output": {"directory", "save_every"},
    "grid": {"points", "bounds_min", "bounds_max", "save_every", "dump_frames"},
}

_KIND_KEYS = {
    "harmonic": {"hessian", "center", "offset"},
    "morse": {"d_e", "a", "q_e"},
    "quartic_double_well": {"a", "b"},
    "polynomial": {"c0", "c1", "c2", "c3", "c4"},
    "user_table": {"file", "q_values", "v_values"},
}


def _floats(text):
    parts = text.replace(",", " ").split()
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"cannot parse float list {text!r}") from exc


def _vector(text, dim, name):
    vals = _floats(text)
    if vals.size == 1 and dim > 1:
        return np.full(dim, vals[0])
    if vals.size != dim:
        raise ConfigError(f"{name} needs {dim} entries, got {vals.size}")
    return vals


def _matrix(text, dim, name):
    vals = _floats(text)
    if vals.size == 1:
        return float(vals[0]) * np.eye(dim)
    if vals.size == dim:
        return np.diag(vals)
    if vals.size == dim * dim:
        return vals.reshape(dim, dim)
    raise ConfigError(f"{name} needs 1, {dim} or {dim * dim} entries, got {vals.size}")


def _bool(text, name):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{name} must be a boolean, got {text!r}")


@dataclass
class RunConfig:
    setup: PhysicalSetup
    model: object
    method_spec: MethodSpec
    scheme: SchemeSpec
    parametrization: str
    initial: object
    out_dir: str
    save_every: int
    grid_options: dict


def _parse_potential(section, dim):
    kind = section.get("kind")
    if kind is None:
        raise ConfigError("[potential] requires a 'kind'")
    if kind not in _KIND_KEYS:
        raise ConfigError(f"unknown potential kind {kind!r}")
    extra = set(section) - {"kind"} - _KIND_KEYS[kind]
    if extra:
        raise ConfigError(f"keys {sorted(extra)} do not apply to potential kind {kind!r}")
    if kind == "harmonic":
        if "hessian" not in section:
            raise ConfigError("harmonic potential requires 'hessian'")
        kw = {"hessian": _matrix(section["hessian"], dim, "hessian")}
        if "center" in section:
            kw["center"] = _vector(section["center"], dim, "center")
        if "offset" in section:
            kw["offset"] = float(section["offset"])
        return build_potential(kind, **kw)
    if kind == "morse":
        if dim != 1:
            raise ConfigError("the morse potential is one-dimensional")
        kw = {k: float(section[k]) for k in ("d_e", "a", "q_e") if k in section}
        return build_potential(kind, **kw)
    if kind == "quartic_double_well":
        if dim != 1:
            raise ConfigError("the quartic double well is one-dimensional")
        kw = {k: float(section[k]) for k in ("a", "b") if k in section}
        return build_potential(kind, **kw)
    if kind == "polynomial":
        kw = {"dim": dim}
        if "c0" in section:
            kw["c0"] = float(section["c0"])
        for order, key in ((1, "c1"), (2, "c2"), (3, "c3"), (4, "c4")):
            if key in section:
                kw[key] = _floats(section[key]).reshape((dim,) * order)
        return build_potential(kind, **kw)
    # user_table
    if "file" in section:
        path = section["file"]
        if not os.path.exists(path):
            raise ConfigError(f"tabulated potential file {path!r} does not exist")
        data = np.loadtxt(path, delimiter=None)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ConfigError("tabulated potential file must have two columns (q, V)")
        return build_potential(kind, q_values=data[:, 0], v_values=data[:, 1])
    if "q_values" not in section or "v_values" not in section:
        raise ConfigError("user_table potential requires 'file' or 'q_values' + 'v_values'")
    return build_potential(kind, q_values=_floats(section["q_values"]),
                           v_values=_floats(section["v_values"]))


def load_config(path):
    """Parse and validate a run configuration file."""
    if not os.path.exists(path):
        raise ConfigError(f"config file {path!r} does not exist")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    for name in parser.sections():
        if name not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{name}]")
        unknown = set(parser[name]) - _SECTION_KEYS[name]
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)} in section [{name}]")
    for required in ("setup", "potential", "method", "scheme", "initial"):
        if required not in parser:
            raise ConfigError(f"missing config section [{required}]")

    sec = parser["setup"]
    try:
        dim = int(sec.get("dim", "1"))
        setup = PhysicalSetup(
            dim=dim, hbar=float(sec.get("hbar", "1.0")),
            mass=_matrix(sec.get("mass", "1.0"), dim, "mass"))
    except GwpdError as exc:
        raise ConfigError(str(exc)) from exc

    model = _parse_potential(parser["potential"], dim)

    msec = parser["method"]
    if "id" not in msec:
        raise ConfigError("[method] requires an 'id'")
    mid = msec["id"]
    if mid not in METHOD_IDS:
        raise ConfigError(f"unknown method id {mid!r}; see 'gwpd list-methods'")
    q_ref = tuple(_vector(msec["q_ref"], dim, "q_ref")) if "q_ref" in msec else None
    method_spec = MethodSpec(mid, q_ref=q_ref)

    ssec = parser["scheme"]
    parametrization = ssec.get("parametrization", "heller").lower()
    if parametrization not in ("heller", "hagedorn"):
        raise ConfigError("parametrization must be 'heller' or 'hagedorn'")
    try:
        scheme = SchemeSpec(
            base=ssec.get("base", "TVT"), dt=float(ssec.get("dt", "0.01")),
            steps=int(ssec.get("steps", "100")), order=int(ssec.get("order", "2")),
            composition=ssec.get("composition", "triple_jump"))
    except (GwpdError, ValueError) as exc:
        raise ConfigError(f"invalid scheme: {exc}") from exc

    isec = parser["initial"]
    for key in ("q0", "p0"):
        if key not in isec:
            raise ConfigError(f"[initial] requires {key!r}")
    q0 = _vector(isec["q0"], dim, "q0")
    p0 = _vector(isec["p0"], dim, "p0")
    heller_keys = {"re_a0", "im_a0", "gamma_re", "gamma_im", "auto_normalize"} & set(isec)
    hag_keys = {"re_q0", "im_q0", "re_p0", "im_p0", "s0"} & set(isec)
    if parametrization == "heller":
        if hag_keys:
            raise ConfigError("heller parametrization takes re_a0/im_a0, not Q0/P0 keys")
        if "im_a0" not in isec:
            raise ConfigError("[initial] requires im_a0")
        a0 = (_matrix(isec.get("re_a0", "0.0"), dim, "re_a0")
              + 1j * _matrix(isec["im_a0"], dim, "im_a0"))
        auto = _bool(isec.get("auto_normalize", "true" if "gamma_im" not in isec else "false"),
                     "auto_normalize")
        if auto and "gamma_im" in isec:
            raise ConfigError("gamma_im conflicts with auto_normalize = true")
        gamma = float(isec.get("gamma_re", "0.0")) + 1j * float(isec.get("gamma_im", "0.0"))
        try:
            initial = GaussianHeller(q0, p0, a0, gamma)
            if auto:
                initial = normalize_initial(initial, setup)
        except GwpdError as exc:
            raise ConfigError(f"invalid initial state: {exc}") from exc
    else:
        if heller_keys:
            raise ConfigError("hagedorn parametrization takes re_q0/im_q0/re_p0/im_p0/s0 keys")
        for key in ("re_q0", "im_q0", "re_p0", "im_p0"):
            if key not in isec:
                raise ConfigError(f"[initial] requires {key!r} in hagedorn parametrization")
        qmat = _matrix(isec["re_q0"], dim, "re_q0") + 1j * _matrix(isec["im_q0"], dim, "im_q0")
        pmat = _matrix(isec["re_p0"], dim, "re_p0") + 1j * _matrix(isec["im_p0"], dim, "im_p0")
        try:
            initial = GaussianHagedorn(q0, p0, qmat, pmat, float(isec.get("s0", "0.0")))
        except GwpdError as exc:
            raise ConfigError(f"invalid initial state: {exc}") from exc

    if method_spec.frozen:
        if parametrization == "hagedorn":
            raise ConfigError(
                "frozen-width (fgwd_*) methods run in the heller parametrization only")
        if np.max(np.abs(initial.A.real)) > 1e-12 * max(np.linalg.norm(initial.A), 1.0):
            raise ConfigError(
                "frozen-width (fgwd_*) methods require a purely imaginary initial "
                "width matrix (Re A0 = 0)")

    out_dir = "."
    save_every = 1
    if "output" in parser:
        out_dir = parser["output"].get("directory", ".")
        save_every = int(parser["output"].get("save_every", "1"))
        if save_every < 1:
            raise ConfigError("save_every must be >= 1")

    grid_options = dict(parser["grid"]) if "grid" in parser else {}
    return RunConfig(setup=setup, model=model, method_spec=method_spec, scheme=scheme,
                     parametrization=parametrization, initial=initial, out_dir=out_dir,
                     save_every=save_every, grid_options=grid_options)


# ---------------------------------------------------------------------------
# artifact writers
# ---------------------------------------------------------------------------


def _fmt(x):
    return f"{x:.17g}"


def _upper_indices(dim):
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def _csv_header(dim, parametrization):
    cols = ["t"]
    cols += [f"q{i}" for i in range(dim)]
    cols += [f"p{i}" for i in range(dim)]
    if parametrization == "heller":
        cols += [f"ReA{i}{j}" for i, j in _upper_indices(dim)]
        cols += [f"ImA{i}{j}" for i, j in _upper_indices(dim)]
        cols += ["Re_gamma", "Im_gamma"]
    else:
        cols += [f"ReQ{i}{j}" for i in range(dim) for j in range(dim)]
        cols += [f"ImQ{i}{j}" for i in range(dim) for j in range(dim)]
        cols += [f"ReP{i}{j}" for i in range(dim) for j in range(dim)]
        cols += [f"ImP{i}{j}" for i in range(dim) for j in range(dim)]
        cols += ["S"]
    cols += ["norm", "E", "E_eff"]
    return cols


def _csv_row(t, state, rec, parametrization):
    dim = state.dim
    vals = [t]
    vals += list(state.q) + list(state.p)
    if parametrization == "heller":
        vals += [state.A[i, j].real for i, j in _upper_indices(dim)]
        vals += [state.A[i, j].imag for i, j in _upper_indices(dim)]
        vals += [state.gamma.real, state.gamma.imag]
    else:
        vals += [state.Q[i, j].real for i in range(dim) for j in range(dim)]
        vals += [state.Q[i, j].imag for i in range(dim) for j in range(dim)]
        vals += [state.P[i, j].real for i in range(dim) for j in range(dim)]
        vals += [state.P[i, j].imag for i in range(dim) for j in range(dim)]
        vals += [state.S]
    vals += [rec.norm, rec.energy, rec.energy_eff]
    if not all(np.isfinite(v) for v in vals):
        raise NumericalError("non-finite value in output row")
    return vals


def write_trajectory_csv(path, traj, parametrization):
    dim = traj.states[0].dim
    with open(path, "w") as fh:
        fh.write(",".join(_csv_header(dim, parametrization)) + "\n")
        for t, state, rec in zip(traj.times, traj.states, traj.diagnostics):
            fh.write(",".join(_fmt(v) for v in _csv_row(t, state, rec, parametrization)) + "\n")


def _drift(series):
    series = np.asarray(series)
    return float(np.max(np.abs(series - series[0])))


def _summary(cfg, traj, wall, residual=None):
    out = {
        "method": cfg.method_spec.id,
        "scheme": f"{cfg.scheme.base}-{cfg.scheme.order}-{cfg.scheme.composition}",
        "dt": cfg.scheme.dt,
        "steps": cfg.scheme.steps,
        "norm_drift": _drift([r.norm for r in traj.diagnostics]),
        "E_drift": _drift([r.energy for r in traj.diagnostics]),
        "E_eff_drift": _drift([r.energy_eff for r in traj.diagnostics]),
        "wall_time_seconds": wall,
    }
    if residual is not None:
        out["reversibility_residual"] = residual
    return out


def _bound_method(cfg):
    engine = ExpectationEngine()
    return bind(cfg.method_spec, cfg.model, cfg.setup, engine=engine,
                q_ref_default=cfg.initial.q)


def cmd_run(cfg, quiet=False):
    os.makedirs(cfg.out_dir, exist_ok=True)
    method = _bound_method(cfg)
    start = time.perf_counter()
    traj = propagate(cfg.initial, cfg.scheme, method, record_every=cfg.save_every)
    wall = time.perf_counter() - start
    write_trajectory_csv(os.path.join(cfg.out_dir, "trajectory.csv"), traj, cfg.parametrization)
    summary = _summary(cfg, traj, wall)
    with open(os.path.join(cfg.out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    if not quiet:
        print(f"wrote {cfg.out_dir}/trajectory.csv ({len(traj)} rows) and summary.json")
    return 0


def _final_state_distance(state_a, state_b):
    if isinstance(state_a, GaussianHagedorn):
        return max(np.max(np.abs(state_a.q - state_b.q)), np.max(np.abs(state_a.p - state_b.p)),
                   np.max(np.abs(state_a.Q - state_b.Q)), np.max(np.abs(state_a.P - state_b.P)),
                   abs(state_a.S - state_b.S))
    return max(np.max(np.abs(state_a.q - state_b.q)), np.max(np.abs(state_a.p - state_b.p)),
               np.max(np.abs(state_a.A - state_b.A)), abs(state_a.gamma - state_b.gamma))


def _converge_one(cfg, dt):
    total = cfg.scheme.dt * cfg.scheme.steps
    steps = int(round(total / dt))
    if steps < 1 or abs(steps * dt - total) > 1e-9 * max(total, 1.0):
        raise ConfigError(f"dt {dt} does not divide the total time {total}")
    scheme = SchemeSpec(base=cfg.scheme.base, dt=dt, steps=steps,
                        order=cfg.scheme.order, composition=cfg.scheme.composition)
    method = _bound_method(cfg)
    traj = propagate(cfg.initial, scheme, method, record_every=steps, diagnostics=False)
    return traj.states[-1]


def cmd_converge(cfg, dt_list, quiet=False):
    from .potentials import HarmonicPotential
    from .reference import quadratic_exact_state

    os.makedirs(cfg.out_dir, exist_ok=True)
    dts = sorted(dt_list, reverse=True)
    workers = int(os.environ.get("GWPD_THREADS", "1"))
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            finals = list(pool.map(_converge_one, [cfg] * len(dts), dts))
    else:
        finals = [_converge_one(cfg, dt) for dt in dts]
    total = cfg.scheme.dt * cfg.scheme.steps
    if isinstance(cfg.model, HarmonicPotential) and cfg.parametrization == "heller":
        reference = quadratic_exact_state(cfg.initial, cfg.model.hessian, total, cfg.setup,
                                          center=cfg.model.center, offset=cfg.model.offset)
        pairs = [(dt, _final_state_distance(st, reference)) for dt, st in zip(dts, finals)]
    else:
        reference = _converge_one(cfg, dts[-1] / 2.0)
        pairs = [(dt, _final_state_distance(st, reference)) for dt, st in zip(dts, finals)]
    usable = [(dt, err) for dt, err in pairs if err > 1e-14]
    if len(usable) >= 2:
        slope = float(np.polyfit(np.log([d for d, _ in usable]),
                                 np.log([e for _, e in usable]), 1)[0])
    else:
        slope = float("nan")
    path = os.path.join(cfg.out_dir, "convergence.csv")
    with open(path, "w") as fh:
        fh.write("dt,error,slope\n")
        for dt, err in pairs:
            fh.write(f"{_fmt(dt)},{_fmt(err)},{_fmt(slope)}\n")
    if not quiet:
        print(f"wrote {path} (fitted slope {slope:.3f})")
    return 0


def cmd_reverse(cfg, quiet=False):
    os.makedirs(cfg.out_dir, exist_ok=True)
    method = _bound_method(cfg)
    start = time.perf_counter()
    residual = reverse_roundtrip(cfg.initial, cfg.scheme, method)
    traj = propagate(cfg.initial, cfg.scheme, method, record_every=max(1, cfg.scheme.steps))
    wall = time.perf_counter() - start
    summary = _summary(cfg, traj, wall, residual=residual)
    with open(os.path.join(cfg.out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    if not quiet:
        print(f"round-trip residual {residual:.3e}")
    return 0


def _auto_grid(cfg, traj):
    dim = cfg.setup.dim
    lo = np.full(dim, np.inf)
    hi = np.full(dim, -np.inf)
    spread = 0.0
    for state, rec in zip(traj.states, traj.diagnostics):
        lo = np.minimum(lo, state.q)
        hi = np.maximum(hi, state.q)
        spread = max(spread, float(np.max(np.sqrt(np.diag(rec.cov_q)))))
    return lo - 8.0 * spread, hi + 8.0 * spread


def cmd_compare_grid(cfg, quiet=False):
    os.makedirs(cfg.out_dir, exist_ok=True)
    method = _bound_method(cfg)
    save_every = int(cfg.grid_options.get("save_every", str(cfg.save_every)))
    traj = propagate(cfg.initial, cfg.scheme, method, record_every=save_every)
    dim = cfg.setup.dim
    if dim > 2:
        raise ConfigError("the grid oracle supports one or two dimensions")
    if "bounds_min" in cfg.grid_options and "bounds_max" in cfg.grid_options:
        lo = _vector(cfg.grid_options["bounds_min"], dim, "bounds_min")
        hi = _vector(cfg.grid_options["bounds_max"], dim, "bounds_max")
    else:
        lo, hi = _auto_grid(cfg, traj)
    default_pts = "512" if dim == 1 else "256"
    pts = cfg.grid_options.get("points", default_pts)
    points = tuple(int(v) for v in _floats(pts)) if len(_floats(pts)) == dim \
        else (int(_floats(pts)[0]),) * dim
    grid = GridSpec(bounds=tuple(zip(lo, hi)), points=points,
                    dt=cfg.scheme.dt, steps=cfg.scheme.steps)
    psi0 = sample_gaussian_on_grid(cfg.initial, grid, cfg.setup)
    try:
        times, frames = grid_propagate(psi0, cfg.model, grid, cfg.setup,
                                       save_every=save_every)
    except NumericalError as exc:
        bounds = ", ".join(f"[{a:g}, {b:g}]" for a, b in grid.bounds)
        raise NumericalError(
            f"{exc} (grid bounds {bounds}; widen them with bounds_min/bounds_max "
            f"in the [grid] section)") from exc
    fid = fidelity_series(traj.states, frames, grid, cfg.setup)
    path = os.path.join(cfg.out_dir, "fidelity.csv")
    with open(path, "w") as fh:
        fh.write("t,fidelity\n")
        for t, f in zip(times, fid):
            fh.write(f"{_fmt(t)},{_fmt(f)}\n")
    if _bool(cfg.grid_options.get("dump_frames", "false"), "dump_frames"):
        dump_frames(os.path.join(cfg.out_dir, "frames.bin"), times, frames, grid)
    if not quiet:
        print(f"wrote {path} (final fidelity {fid[-1]:.6f})")
    return 0


def cmd_list_methods(args):
    if args.emit_coeffs:
        if not (args.config and args.q and args.im_a):
            raise ConfigError("--emit-coeffs requires --config, --q and --im-a")
        cfg = load_config(args.config)
        dim = cfg.setup.dim
        q = _vector(args.q, dim, "--q")
        im_a = _matrix(args.im_a, dim, "--im-a")
        method = _bound_method(cfg)
        coeffs = method.coefficients_at(q, im_a)
        print(json.dumps({
            "method": cfg.method_spec.id,
            "hbar": cfg.setup.hbar,
            "q": list(q),
            "im_a": [list(row) for row in im_a],
            "v0": coeffs.v0,
            "v1": list(coeffs.v1),
            "v2": [list(row) for row in coeffs.v2],
        }))
        return 0
    if args.emit_potential:
        if not (args.config and args.q_grid):
            raise ConfigError("--emit-potential requires --config and --q-grid")
        cfg = load_config(args.config)
        if cfg.setup.dim != 1:
            raise ConfigError("--emit-potential emits one-dimensional scans only")
        try:
            lo, hi, n = args.q_grid.split(":")
            qs = np.linspace(float(lo), float(hi), int(n))
        except ValueError as exc:
            raise ConfigError("--q-grid must be 'lo:hi:n'") from exc
        vals = cfg.model.evaluate_many(qs[:, None], 0)
        print(json.dumps({"hbar": cfg.setup.hbar, "q": list(qs), "v": list(vals)}))
        return 0
    for mid in METHOD_IDS:
        print(mid)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(prog="gwpd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="path to the run config")
        p.add_argument("--output", default=None, help="override the output directory")
        p.add_argument("--quiet", action="store_true")

    add_common(sub.add_parser("run", help="propagate and write artifacts"))
    conv = sub.add_parser("converge", help="error-vs-dt study at fixed total time")
    add_common(conv)
    conv.add_argument("--dt-list", required=True, help="comma-separated dt values")
    add_common(sub.add_parser("reverse", help="forward/backward round trip"))
    add_common(sub.add_parser("compare-grid", help="fidelity against the grid oracle"))
    lm = sub.add_parser("list-methods", help="list method ids / emit coefficient JSON")
    lm.add_argument("--emit-coeffs", action="store_true")
    lm.add_argument("--emit-potential", action="store_true")
    lm.add_argument("--config", default=None)
    lm.add_argument("--q", default=None, help="center at which to evaluate coefficients")
    lm.add_argument("--im-a", default=None, help="width matrix Im A (row-major)")
    lm.add_argument("--q-grid", default=None, help="potential scan range 'lo:hi:n'")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-methods":
            return cmd_list_methods(args)
        cfg = load_config(args.config)
        if args.output:
            cfg.out_dir = args.output
        if args.command == "run":
            return cmd_run(cfg, quiet=args.quiet)
        if args.command == "converge":
            try:
                dts = [float(v) for v in args.dt_list.split(",")]
            except ValueError:
                raise ConfigError("--dt-list must be comma-separated floats") from None
            return cmd_converge(cfg, dts, quiet=args.quiet)
        if args.command == "reverse":
            return cmd_reverse(cfg, quiet=args.quiet)
        if args.command == "compare-grid":
            return cmd_compare_grid(cfg, quiet=args.quiet)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except GwpdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
