"""Command-line front end.

Commands
--------
evolve             time evolution (analytic timed-Dicke or pulse propagation)
subradiance-sweep  subradiant passage times versus optical depth
homodyne           interference of the transmitted light with a local oscillator
spectrum           ensemble transmission over a detuning grid
decompose          projections onto the collective (super/subradiant) basis

Parameters come from flags and/or a TOML config file (flags win).  Config
schema (flat keys, optional tables)::

    n_atoms = 4            # or: od = 31.0 (inverted to an atom count)
    beta = 0.4             # or: betas = [0.1, 0.2, ...] (heterogeneous)
    gamma_hz = 2.6e6       # gamma/2pi in Hz; enables the time_ns column

    [pulse]
    shape = "boxcar"       # delta | boxcar | heaviside
    duration_ns = 100.0    # or duration (units of 1/gamma)
    detuning = 0.0         # carrier detuning in units of gamma
    fall_time_ns = 0.0

    [grid]
    count = 262144         # power of two
    dt = 0.015707963       # sample spacing, units of 1/gamma

    [lo]
    duration_ns = 240.0
    start_ns = -60.0
    relative_phase = 3.141592653589793
    amplitude = 1.0

    [sweep]
    od_min = 10.0
    od_max = 63.0
    points = 8
    betas = [0.0055, 0.2]
    count = 3
    workers = 4

Entry of (od, beta): `evolve`, `homodyne`, `spectrum` and `decompose` resolve
the atom count through the exact resonant-transmission formula (smallest N
whose optical depth reaches the target; the achieved OD is reported in the
manifest).  `subradiance-sweep` instead inverts the weak-coupling relation
OD = 4*beta*N (nearest integer), which is the convention under which passage
times collapse onto a single curve per OD for any beta.

Times in output files are always in units of 1/gamma; a time_ns column is
added when gamma_hz is known.  When an *-ns flag is used without gamma_hz,
gamma/2pi defaults to 2.6 MHz.  Exit codes: 0 success, 2 configuration
error, 3 numeric or physics precondition failure.
"""

from __future__ import annotations

import math
import sys
import time

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import io
from .analytic import subradiant_times, timed_dicke_phis
from .errors import ConfigError, SubradianceError
from .model import EnsembleParams, atoms_for_od, collective_basis, od
from .observables import decompose_from_arrays, gamma_ens_from_arrays, gamma_light_from_arrays
from .pulse import (
    Pulse,
    TimeGrid,
    atom_traces,
    decay_window,
    homodyne as interfere,
    passage_times,
    propagate,
    ring_roundtrips,
    sign_flips,
)
from .specfun import laguerre_leading_roots
from .spectral import ensemble_transmission

DEFAULT_GAMMA_HZ = 2.6e6
_ATOM_TRACE_LIMIT = 64

_KNOWN_KEYS = {
    "": {"n_atoms", "beta", "betas", "od", "gamma_hz"},
    "pulse": {"shape", "duration", "duration_ns", "detuning", "fall_time", "fall_time_ns", "amplitude"},
    "grid": {"count", "dt"},
    "lo": {"duration_ns", "start_ns", "relative_phase", "amplitude"},
    "sweep": {"od_min", "od_max", "points", "betas", "count", "workers", "roundtrips", "od_single"},
}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    unknown = []
    for key, value in cfg.items():
        if isinstance(value, dict):
            if key not in _KNOWN_KEYS:
                unknown.append(key)
            else:
                unknown += [f"{key}.{sub}" for sub in value if sub not in _KNOWN_KEYS[key]]
        elif key not in _KNOWN_KEYS[""]:
            unknown.append(key)
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(sorted(unknown)))
    return cfg


def _pick(flag, cfg: dict, section: str, key: str, default=None):
    """Flag value if given, else config value, else default."""
    if flag is not None:
        return flag
    table = cfg.get(section, {}) if section else cfg
    return table.get(key, default)


def _resolve_gamma_hz(gamma_hz, cfg, ns_requested: bool) -> float | None:
    value = _pick(gamma_hz, cfg, "", "gamma_hz")
    if value is None and ns_requested:
        value = DEFAULT_GAMMA_HZ
    return value


def _ns_factor(gamma_hz: float) -> float:
    """gamma*t per nanosecond."""
    return 2.0 * math.pi * gamma_hz * 1e-9


def _resolve_params(cfg, n_atoms, beta, target_od, gamma_hz) -> tuple[EnsembleParams, dict]:
    n_atoms = _pick(n_atoms, cfg, "", "n_atoms")
    beta = _pick(beta, cfg, "", "beta")
    target_od = _pick(target_od, cfg, "", "od")
    betas = cfg.get("betas")
    if betas is not None:
        params = EnsembleParams(n_atoms=len(betas), betas=tuple(betas), gamma_hz=gamma_hz)
    elif n_atoms is not None and beta is not None:
        params = EnsembleParams.uniform(int(n_atoms), float(beta), gamma_hz=gamma_hz)
    elif target_od is not None and beta is not None:
        n = atoms_for_od(float(target_od), float(beta))
        params = EnsembleParams.uniform(n, float(beta), gamma_hz=gamma_hz)
    else:
        raise ConfigError("specify either (--n-atoms, --beta), (--od, --beta) or betas[] in the config")
    resolved = {
        "n_atoms": params.n_atoms,
        "betas": list(params.betas),
        "gamma_hz": gamma_hz,
        "od_achieved": od(params),
        "od_requested": target_od,
    }
    return params, resolved


def _resolve_grid(cfg, grid_count, grid_dt) -> TimeGrid:
    count = _pick(grid_count, cfg, "grid", "count")
    dt = _pick(grid_dt, cfg, "grid", "dt")
    kwargs = {}
    if count is not None:
        kwargs["count"] = int(count)
    if dt is not None:
        kwargs["dt"] = float(dt)
    return TimeGrid.default(**kwargs)


def _resolve_pulse(cfg, shape, duration, duration_ns, detuning, fall_time_ns, gamma_hz) -> Pulse:
    shape = _pick(shape, cfg, "pulse", "shape", "delta")
    duration = _pick(duration, cfg, "pulse", "duration")
    duration_ns = _pick(duration_ns, cfg, "pulse", "duration_ns")
    detuning = _pick(detuning, cfg, "pulse", "detuning", 0.0)
    fall_time_ns = _pick(fall_time_ns, cfg, "pulse", "fall_time_ns")
    fall_time = cfg.get("pulse", {}).get("fall_time", 0.0)
    if duration is None:
        if duration_ns is None and shape == "boxcar":
            duration_ns = 100.0
        if duration_ns is not None:
            duration = float(duration_ns) * _ns_factor(gamma_hz or DEFAULT_GAMMA_HZ)
        else:
            duration = 1.0
    if fall_time_ns is not None:
        fall_time = float(fall_time_ns) * _ns_factor(gamma_hz or DEFAULT_GAMMA_HZ)
    amplitude = cfg.get("pulse", {}).get("amplitude", 1.0)
    return Pulse(shape=shape, duration=float(duration), carrier_detuning=float(detuning),
                 amplitude=complex(amplitude), fall_time=float(fall_time))


def _grid_meta(grid: TimeGrid) -> dict:
    return {"count": grid.count, "dt": grid.dt, "origin": grid.origin}


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_atoms(spec: str | None):
    if spec is None:
        return None
    try:
        return tuple(int(s) for s in spec.split(","))
    except ValueError as exc:
        raise ConfigError(f"--atoms expects a comma-separated integer list: {exc}") from exc


@click.group()
def cli() -> None:
    """Collective-decay simulator for waveguide-coupled atom ensembles."""


def _param_options(fn):
    for option in reversed([
        click.option("--config", "config_path", type=click.Path(exists=True), help="TOML config file."),
        click.option("--out", default=".", show_default=True, help="Output directory."),
        click.option("--n-atoms", type=int, help="Number of atoms."),
        click.option("--beta", type=float, help="Guided-mode coupling fraction per atom."),
        click.option("--od", "target_od", type=float, help="Target optical depth (alternative to --n-atoms)."),
        click.option("--gamma-hz", type=float, help="gamma/2pi in Hz (enables ns columns)."),
    ]):
        fn = option(fn)
    return fn


def _pulse_options(fn):
    for option in reversed([
        click.option("--pulse", "pulse_shape", type=click.Choice(["delta", "boxcar", "heaviside"]),
                     help="Excitation pulse shape (selects spectral mode)."),
        click.option("--duration", type=float, help="Pulse duration in units of 1/gamma."),
        click.option("--duration-ns", type=float, help="Pulse duration in nanoseconds."),
        click.option("--detuning", type=float, help="Carrier detuning in units of gamma."),
        click.option("--fall-time-ns", type=float, help="Linear switch-off ramp in nanoseconds."),
        click.option("--grid-count", type=int, help="Time grid length (power of two)."),
        click.option("--grid-dt", type=float, help="Time step in units of 1/gamma."),
        click.option("--roundtrips", type=int, default=1, show_default=True,
                     help="Passes through the ensemble (ring resonator)."),
    ]):
        fn = option(fn)
    return fn


@cli.command()
@_param_options
@_pulse_options
@click.option("--mode", type=click.Choice(["auto", "analytic", "spectral"]), default="auto",
              show_default=True, help="analytic: timed-Dicke closed forms; spectral: pulse propagation.")
@click.option("--t-max", type=float, default=20.0, show_default=True,
              help="Analytic-mode trace length in units of 1/gamma.")
@click.option("--samples", type=int, default=20001, show_default=True,
              help="Analytic-mode sample count.")
@click.option("--atoms", help="Comma-separated atom indices to trace (spectral mode).")
def evolve(config_path, out, n_atoms, beta, target_od, gamma_hz, pulse_shape, duration,
           duration_ns, detuning, fall_time_ns, grid_count, grid_dt, roundtrips, mode,
           t_max, samples, atoms):
    """Evolve the ensemble and write field, atom and decay-rate traces."""
    started = time.monotonic()
    cfg = _load_config(config_path)
    ns_requested = any(v is not None for v in (duration_ns, fall_time_ns))
    gamma_hz = _resolve_gamma_hz(gamma_hz, cfg, ns_requested)
    params, resolved = _resolve_params(cfg, n_atoms, beta, target_od, gamma_hz)
    if mode == "auto":
        pulse_given = pulse_shape is not None or "pulse" in cfg
        mode = "spectral" if pulse_given else "analytic"
    out_path = _out_dir(out)
    outputs = []
    if mode == "analytic":
        times = np.linspace(0.0, t_max, samples)
        resolved_grid = {"t_max": t_max, "samples": samples}
        meta = io.metadata_hash({"cmd": "evolve", "mode": mode, **resolved, **resolved_grid})
        phis = timed_dicke_phis(params, times)
        couplings = np.sqrt(2.0 * params.gamma * np.asarray(params.betas))
        chi = np.sum((couplings / 1j)[:, None] * phis, axis=0)
        cols = io.trace_columns(times, chi, gamma_hz)
        outputs.append(io.write_csv(out_path / "field.csv", cols, meta))
        acols = {"time_gamma": times}
        if gamma_hz is not None:
            acols["time_ns"] = times / _ns_factor(gamma_hz)
        for i in range(params.n_atoms):
            acols[f"atom{i + 1}_re"] = phis[i].real if np.iscomplexobj(phis) else phis[i]
            acols[f"atom{i + 1}_im"] = phis[i].imag if np.iscomplexobj(phis) else np.zeros_like(times)
        if params.n_atoms <= _ATOM_TRACE_LIMIT:
            outputs.append(io.write_csv(out_path / "atoms.csv", acols, meta))
        rates = gamma_ens_from_arrays(times, phis, params)
        light = gamma_light_from_arrays(times, np.abs(chi) ** 2)
        rcols = {"time_gamma": rates.times}
        if gamma_hz is not None:
            rcols["time_ns"] = rates.times / _ns_factor(gamma_hz)
        rcols["gamma_ens"] = rates.gamma_ens
        rcols["gamma_ens_wg"] = rates.gamma_ens_wg
        rcols["gamma_fs"] = np.full_like(rates.times, rates.gamma_fs)
        rcols["gamma_light"] = light.values[: rates.times.size]
        outputs.append(io.write_csv(out_path / "rates.csv", rcols, meta))
        extra = {"passage_times_gamma": [io.fmt(t) for t in subradiant_times(params)[:5]]}
    else:
        grid = _resolve_grid(cfg, grid_count, grid_dt)
        pulse = _resolve_pulse(cfg, pulse_shape, duration, duration_ns, detuning, fall_time_ns, gamma_hz)
        resolved_grid = _grid_meta(grid)
        pulse_meta = {"shape": pulse.shape, "duration": pulse.duration,
                      "detuning": pulse.carrier_detuning, "fall_time": pulse.fall_time,
                      "roundtrips": roundtrips}
        meta = io.metadata_hash({"cmd": "evolve", "mode": mode, **resolved, **resolved_grid, **pulse_meta})
        field = (ring_roundtrips(pulse, params, roundtrips, grid) if roundtrips > 1
                 else propagate(pulse, params, grid))
        t0, _ = pulse.edges(grid)
        keep = (field.grid.times >= t0 - 1.0) & (field.grid.times <= 50.0)
        cols = io.trace_columns(field.grid.times[keep], field.samples[keep], gamma_hz)
        outputs.append(io.write_csv(out_path / "field.csv", cols, meta))
        minima = passage_times(field, count=5)
        extra = {"passage_times_gamma": [io.fmt(t) for t in minima],
                 "pulse": pulse_meta}
        if gamma_hz is not None:
            extra["passage_times_ns"] = [io.fmt(t / _ns_factor(gamma_hz)) for t in minima]
        atom_subset = _parse_atoms(atoms)
        if atom_subset is None and params.n_atoms <= _ATOM_TRACE_LIMIT and roundtrips == 1:
            atom_subset = tuple(range(1, params.n_atoms + 1))
        if atom_subset is not None:
            traces = atom_traces(pulse, params, grid, atoms=atom_subset)
            acols = {"time_gamma": grid.times[keep]}
            if gamma_hz is not None:
                acols["time_ns"] = grid.times[keep] / _ns_factor(gamma_hz)
            for i, idx in enumerate(traces.atom_indices):
                acols[f"atom{idx}_re"] = traces.phis[i][keep].real
                acols[f"atom{idx}_im"] = traces.phis[i][keep].imag
            outputs.append(io.write_csv(out_path / "atoms.csv", acols, meta))
            if traces.atom_indices == tuple(range(1, params.n_atoms + 1)):
                sel = (grid.times > 0) & keep
                rates = gamma_ens_from_arrays(grid.times[sel], traces.phis[:, sel], params)
                rcols = {"time_gamma": rates.times,
                         "gamma_ens": rates.gamma_ens,
                         "gamma_ens_wg": rates.gamma_ens_wg,
                         "gamma_fs": np.full_like(rates.times, rates.gamma_fs)}
                outputs.append(io.write_csv(out_path / "rates.csv", rcols, meta))
    io.write_manifest(out_path / "manifest.json", parameters=resolved, grid=resolved_grid,
                      outputs=outputs, duration_s=time.monotonic() - started, extra=extra)
    click.echo(f"wrote {len(outputs)} trace file(s) to {out_path}")


@cli.command(name="subradiance-sweep")
@_param_options
@click.option("--od-min", type=float, help="Sweep start (optical depth).")
@click.option("--od-max", type=float, help="Sweep end (optical depth).")
@click.option("--points", type=int, help="Number of sweep points.")
@click.option("--betas", "betas_opt", help="Comma-separated coupling fractions to sweep.")
@click.option("--count", "tau_count", type=int, help="Passage times per OD point.")
@click.option("--workers", type=int, help="Concurrent sweep workers.")
@click.option("--roundtrips", type=int, help="Ring passes; combine with --od-single.")
@click.option("--od-single", type=float, help="Single-pass OD for ring mode.")
def subradiance_sweep(config_path, out, n_atoms, beta, target_od, gamma_hz, od_min, od_max,
                      points, betas_opt, tau_count, workers, roundtrips, od_single):
    """Tabulate subradiant passage times versus optical depth.

    Atom counts are resolved through OD = 4*beta*N (nearest integer), the
    weak-coupling convention under which the passage-time curves for
    different beta values collapse.  The achieved OD per point is the od
    column of the output.
    """
    started = time.monotonic()
    cfg = _load_config(config_path)
    gamma_hz = _resolve_gamma_hz(gamma_hz, cfg, ns_requested=True)
    sweep = cfg.get("sweep", {})
    od_min = _pick(od_min, cfg, "sweep", "od_min", 10.0)
    od_max = _pick(od_max, cfg, "sweep", "od_max", 63.0)
    points = int(_pick(points, cfg, "sweep", "points", 8))
    tau_count = int(_pick(tau_count, cfg, "sweep", "count", 3))
    workers = int(_pick(workers, cfg, "sweep", "workers", 4))
    roundtrips = _pick(roundtrips, cfg, "sweep", "roundtrips")
    od_single = _pick(od_single, cfg, "sweep", "od_single")
    if betas_opt is not None:
        beta_list = [float(s) for s in betas_opt.split(",")]
    elif "betas" in sweep:
        beta_list = [float(b) for b in sweep["betas"]]
    elif beta is not None or "beta" in cfg:
        beta_list = [float(_pick(beta, cfg, "", "beta"))]
    else:
        beta_list = [0.0055, 0.2]
    if roundtrips is not None:
        if od_single is None:
            raise ConfigError("--roundtrips requires --od-single")
        od_points = [float(roundtrips) * float(od_single)]
    else:
        od_points = list(np.linspace(od_min, od_max, points))

    def tau_row(beta_value: float, od_point: float):
        if roundtrips is not None:
            n_single = max(2, round(float(od_single) / (4.0 * beta_value)))
            n = int(roundtrips) * n_single
        else:
            n = max(2, round(od_point / (4.0 * beta_value)))
        roots = laguerre_leading_roots(n - 1, tau_count)
        achieved = 4.0 * beta_value * n
        return [(achieved, m + 1, x / (2.0 * beta_value)) for m, x in enumerate(roots)]

    out_path = _out_dir(out)
    outputs = []
    meta_base = {"cmd": "subradiance-sweep", "od_points": od_points, "betas": beta_list,
                 "count": tau_count, "gamma_hz": gamma_hz,
                 "roundtrips": roundtrips, "od_single": od_single}
    meta = io.metadata_hash(meta_base)
    for beta_value in beta_list:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = [r for chunk in pool.map(lambda o: tau_row(beta_value, o), od_points) for r in chunk]
        cols = {
            "od": [r[0] for r in rows],
            "m": [r[1] for r in rows],
            "tau_ns": [r[2] / _ns_factor(gamma_hz) for r in rows],
            "tau_gamma": [r[2] for r in rows],
        }
        outputs.append(io.write_csv(out_path / f"sweep_beta_{beta_value:g}.csv", cols, meta))
    io.write_manifest(out_path / "manifest.json", parameters=meta_base, grid={},
                      outputs=outputs, duration_s=time.monotonic() - started)
    click.echo(f"wrote {len(outputs)} sweep file(s) to {out_path}")


@cli.command(name="homodyne")
@_param_options
@_pulse_options
@click.option("--lo-duration-ns", type=float, help="Local-oscillator duration [ns].")
@click.option("--lo-start-ns", type=float, help="Local-oscillator leading edge [ns].")
@click.option("--lo-amplitude", type=float, help="Local-oscillator amplitude.")
@click.option("--relative-phase", type=float, help="LO phase offset [rad]; default pi "
              "(ring bookkeeping: emission and excitation pick up pi each).")
def homodyne_cmd(config_path, out, n_atoms, beta, target_od, gamma_hz, pulse_shape, duration,
                 duration_ns, detuning, fall_time_ns, grid_count, grid_dt, roundtrips,
                 lo_duration_ns, lo_start_ns, lo_amplitude, relative_phase):
    """Interfere the transmitted light with a boxcar local oscillator."""
    started = time.monotonic()
    cfg = _load_config(config_path)
    gamma_hz = _resolve_gamma_hz(gamma_hz, cfg, ns_requested=True)
    params, resolved = _resolve_params(cfg, n_atoms, beta, target_od, gamma_hz)
    grid = _resolve_grid(cfg, grid_count, grid_dt)
    if pulse_shape is None and "pulse" not in cfg:
        pulse_shape = "boxcar"
        duration_ns = duration_ns if duration_ns is not None else 110.0
    pulse = _resolve_pulse(cfg, pulse_shape, duration, duration_ns, detuning, fall_time_ns, gamma_hz)
    factor = _ns_factor(gamma_hz or DEFAULT_GAMMA_HZ)
    lo_duration_ns = _pick(lo_duration_ns, cfg, "lo", "duration_ns", 240.0)
    lo_start_ns = _pick(lo_start_ns, cfg, "lo", "start_ns", -60.0)
    lo_amplitude = _pick(lo_amplitude, cfg, "lo", "amplitude", 1.0)
    relative_phase = _pick(relative_phase, cfg, "lo", "relative_phase", math.pi)
    lo = Pulse(shape="boxcar", duration=float(lo_duration_ns) * factor,
               amplitude=complex(lo_amplitude), start=float(lo_start_ns) * factor)
    signal = (ring_roundtrips(pulse, params, roundtrips, grid) if roundtrips > 1
              else propagate(pulse, params, grid))
    result = interfere(signal, lo, relative_phase=float(relative_phase))
    lo_end = (float(lo_start_ns) + float(lo_duration_ns)) * factor
    _, decay_end = decay_window(signal)
    flips = sign_flips(result.in_phase, grid.times, 0.0, min(lo_end, decay_end))
    resolved_grid = _grid_meta(grid)
    meta = io.metadata_hash({"cmd": "homodyne", **resolved, **resolved_grid,
                             "lo": [lo_duration_ns, lo_start_ns, lo_amplitude, relative_phase],
                             "pulse": [pulse.shape, pulse.duration, pulse.carrier_detuning],
                             "roundtrips": roundtrips})
    out_path = _out_dir(out)
    keep = (grid.times >= 2.0 * float(lo_start_ns) * factor) & (grid.times <= 1.5 * lo_end)
    cols = {"time_gamma": grid.times[keep]}
    if gamma_hz is not None:
        cols["time_ns"] = grid.times[keep] / factor
    cols["power"] = result.power[keep]
    cols["in_phase"] = result.in_phase[keep]
    outputs = [io.write_csv(out_path / "homodyne.csv", cols, meta)]
    extra = {"sign_flips": flips,
             "passage_times_gamma": [io.fmt(t) for t in passage_times(signal, count=5)]}
    io.write_manifest(out_path / "manifest.json", parameters=resolved, grid=resolved_grid,
                      outputs=outputs, duration_s=time.monotonic() - started, extra=extra)
    click.echo(f"wrote homodyne trace to {out_path} ({flips} sign flip(s))")


@cli.command()
@_param_options
@click.option("--span", type=float, default=20.0, show_default=True,
              help="Detuning half-range in units of gamma.")
@click.option("--points", type=int, default=2001, show_default=True)
def spectrum(config_path, out, n_atoms, beta, target_od, gamma_hz, span, points):
    """Ensemble amplitude transmission over a detuning grid."""
    started = time.monotonic()
    cfg = _load_config(config_path)
    gamma_hz = _resolve_gamma_hz(gamma_hz, cfg, ns_requested=False)
    params, resolved = _resolve_params(cfg, n_atoms, beta, target_od, gamma_hz)
    delta = np.linspace(-span, span, points)
    t_n = ensemble_transmission(delta, params)
    meta = io.metadata_hash({"cmd": "spectrum", **resolved, "span": span, "points": points})
    cols = {
        "delta": delta,
        "re": t_n.real,
        "im": t_n.imag,
        "magnitude": np.abs(t_n),
        "phase": np.angle(t_n),
        "power_transmission": np.abs(t_n) ** 2,
    }
    out_path = _out_dir(out)
    outputs = [io.write_csv(out_path / "spectrum.csv", cols, meta)]
    io.write_manifest(out_path / "manifest.json", parameters=resolved,
                      grid={"span": span, "points": points}, outputs=outputs,
                      duration_s=time.monotonic() - started)
    click.echo(f"wrote transmission spectrum to {out_path}")


@cli.command()
@_param_options
@click.option("--t-max", type=float, default=60.0, show_default=True,
              help="Trace length in units of 1/gamma.")
@click.option("--samples", type=int, default=6001, show_default=True)
def decompose(config_path, out, n_atoms, beta, target_od, gamma_hz, t_max, samples):
    """Project the freely decaying timed-Dicke state onto the collective basis."""
    started = time.monotonic()
    cfg = _load_config(config_path)
    gamma_hz = _resolve_gamma_hz(gamma_hz, cfg, ns_requested=False)
    params, resolved = _resolve_params(cfg, n_atoms, beta, target_od, gamma_hz)
    if params.n_atoms > 200:
        raise SubradianceError("decomposition supports up to 200 atoms")
    basis = collective_basis(params)
    times = np.linspace(0.0, t_max, samples)
    # the projections are normalized by the instantaneous population, so the
    # overall e^{-gamma t} decay cancels; removing it here keeps the trace
    # clear of the population underflow floor at long times
    phis = timed_dicke_phis(params, times) * np.exp(params.gamma * times)
    trace = decompose_from_arrays(times, phis, basis)
    meta = io.metadata_hash({"cmd": "decompose", **resolved, "t_max": t_max, "samples": samples})
    cols = {"time_gamma": trace.times}
    if gamma_hz is not None:
        cols["time_ns"] = trace.times / _ns_factor(gamma_hz)
    cols["proj_timed_dicke"] = trace.projections[:, 0]
    for m in range(1, params.n_atoms):
        cols[f"proj_sub_{m}"] = trace.projections[:, m]
    out_path = _out_dir(out)
    outputs = [io.write_csv(out_path / "decomposition.csv", cols, meta)]
    extra = {"passage_times_gamma": [io.fmt(t) for t in basis.times[:5]]}
    io.write_manifest(out_path / "manifest.json", parameters=resolved,
                      grid={"t_max": t_max, "samples": samples}, outputs=outputs,
                      duration_s=time.monotonic() - started, extra=extra)
    click.echo(f"wrote decomposition to {out_path}")


def main(argv=None) -> int:
    """Console entry point with the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.Abort:
        return 1
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return 2
    except (SubradianceError, ValueError) as exc:
        click.echo(f"computation error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
