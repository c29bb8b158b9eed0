"""Command-line front end: figure presets, parameter sweeps, CSV + manifest output.

Every data-producing run writes ``<out>`` (CSV) and ``<out>.manifest.json``
holding the resolved configuration and options; ``replay`` re-runs a manifest.
Errors are reported as one JSON object on standard error, with exit code 1
for configuration problems, 2 for domain problems and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .entanglement import calibrate_epsilon, condition_no_filter, condition_with_filter, e_fil
from .errors import ConfigError, GIEError, UnsupportedError
from .feedback import FeedbackParams, fb_bounds, fb_noise_condition
from .finitetime import (WindowedGridPoint, error_budget, integrand_poles, snr_contour, time_to_snr)
from .params import ExperimentConfig, config_from_dict, derive_mode_params
from .spectra import spectral_densities
from .wiener import wiener_filters

THREADS_ENV = "GIE_THREADS"
REFERENCE_E_FIL = 0.30

# ------------------------------------------------------------------ presets

PRESETS = {
    "fig2-left": {
        "command": "sweep",
        "config": {"laser_power_w": 1e-10},
        "options": {"axis1": {"name": "squeeze_r", "min": 0.0, "max": 1.5, "count": 101, "scale": "linear"},
                    "axis2": {"name": "squeeze_phi_rad", "min": 0.0, "max": math.pi, "count": 101,
                              "scale": "linear"}},
    },
    "fig2-right": {
        "command": "sweep",
        "config": {"squeeze_phi_rad": math.pi / 2},
        "options": {"axis1": {"name": "squeeze_r", "min": 0.0, "max": 1.5, "count": 61, "scale": "linear"},
                    "axis2": {"name": "laser_power_w", "min": 1e-12, "max": 1e-6, "count": 61, "scale": "log"}},
    },
    "fig3-left": {
        "command": "finite-time",
        "config": {"squeeze_r": 1.0, "squeeze_phi_rad": math.pi / 2, "laser_power_w": 1e-10},
        "options": {"t_min_s": 1e3, "t_max_s": 1e7, "count": 81, "n0": 1},
    },
    "fig3-right": {
        "command": "snr",
        "config": {"squeeze_r": 1.0, "squeeze_phi_rad": math.pi / 2, "laser_power_w": 1e-10},
        "options": {"log10_t_min": 5.5, "log10_t_max": 7.0, "t_count": 31, "n0_min": 1, "n0_max": 30},
    },
}

DEFAULTS = {
    "entanglement": {"omega": None},
    "sweep": {"axis1": PRESETS["fig2-left"]["options"]["axis1"],
              "axis2": PRESETS["fig2-left"]["options"]["axis2"], "fixed": {}},
    "finite-time": {"t_min_s": 1e3, "t_max_s": 1e7, "count": 41, "n0": 1, "method": "residue"},
    "snr": {"log10_t_min": 5.5, "log10_t_max": 7.0, "t_count": 31, "n0_min": 1, "n0_max": 30,
            "level": 1.0, "method": "residue"},
    "time-to-snr": {"target_snr": 1.0, "n0_max": 32, "method": "residue"},
    "spectra": {"w_min": 0.5, "w_max": 1.5, "count": 1001},
    "filters": {"w_min": 0.0, "w_max": 5.0, "count": 1001},
    "poles": {},
    "feedback-bound": {"margin": 0.1, "g_cd": None},
    "oracle-validate": {"n_traj": 200, "duration_s": 1.6e7, "seed": 20240611, "feedback": True,
                        "step_check": True, "dump": None},
}

# ------------------------------------------------------------------ sweeps

_FB_FIELDS = {f.name for f in dataclasses.fields(FeedbackParams)}
_CFG_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


@dataclasses.dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in _CFG_FIELDS | _FB_FIELDS:
            raise ConfigError(f"unknown sweep parameter {self.name!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ConfigError(f"axis {self.name}: count must be an integer >= 2")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.name}: min must be below max")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis {self.name}: scale must be linear or log")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError(f"axis {self.name}: log scale needs a positive minimum")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), int(self.count))
        return np.linspace(self.min, self.max, int(self.count))


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    fixed: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ConfigError("sweep axes must differ")
        bad = set(self.fixed) - _CFG_FIELDS - _FB_FIELDS
        if bad:
            raise ConfigError(f"unknown fixed overrides: {sorted(bad)}")

    @classmethod
    def from_options(cls, opts: dict) -> "SweepSpec":
        return cls(Axis(**opts["axis1"]), Axis(**opts["axis2"]), dict(opts.get("fixed", {})))


UNITS = {"squeeze_r": "1", "squeeze_phi_rad": "rad", "laser_power_w": "W", "epsilon": "1",
         "separation_m": "m", "env_temperature_k": "K", "photon_nth": "1", "mirror_mass_kg": "kg",
         "cavity_length_m": "m", "g_cd": "1", "omega_fb": "rad/s", "margin": "1"}


def _unit(name: str) -> str:
    return UNITS.get(name, "Hz" if name.endswith("_hz") else "1")


def _sweep_cell(args):
    cfg, changes = args
    try:
        c = cfg.replace(**{k: v for k, v in changes.items() if k in _CFG_FIELDS})
        rep = e_fil(c)
        nf = condition_no_filter(c)
        try:
            wf = condition_with_filter(c)
            wf_val = (wf.lhs - wf.rhs, float(wf.satisfied))
        except UnsupportedError:
            wf_val = (math.nan, math.nan)
        return (rep.e_fil, math.log10(rep.e_fil), float(rep.entangled),
                nf.lhs - nf.rhs, float(nf.satisfied), *wf_val), None
    except (GIEError, ArithmeticError, ValueError) as exc:
        return (math.nan,) * 7, f"{type(exc).__name__}: {exc}"


# ---------------------------------------------------------------- helpers

def _threads(opts: dict) -> int:
    n = opts.get("threads")
    if n is None:
        env = os.environ.get(THREADS_ENV)
        try:
            n = int(env) if env else 1
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from exc
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def _mapper(threads: int):
    if threads <= 1:
        return map, None
    pool = ProcessPoolExecutor(max_workers=threads)
    return (lambda fn, it: pool.map(fn, it, chunksize=8)), pool


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    return "nan" if math.isnan(v) else repr(v)


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# --------------------------------------------------------------- commands
# Each command takes (cfg, opts, out) and returns (summary dict, list of written files).

def cmd_entanglement(cfg, opts, out):
    rep = e_fil(cfg, opts.get("omega"))
    summary = dataclasses.asdict(rep)
    files = []
    if out:
        write_csv(out, ["omega [rad/s]", "rq2_plus [1]", "rp2_minus [1]", "comm_sq [1]", "freq_ratio [1]",
                        "e_fil [1]", "entangled [bool]"],
                  [[rep.omega, rep.rq2_plus, rep.rp2_minus, rep.comm_sq, rep.freq_ratio, rep.e_fil,
                    rep.entangled]])
        files.append(out)
    return summary, files


def cmd_sweep(cfg, opts, out):
    spec = SweepSpec.from_options(opts)
    base = cfg.replace(**{k: v for k, v in spec.fixed.items() if k in _CFG_FIELDS})
    v1, v2 = spec.axis1.values(), spec.axis2.values()
    jobs = [(base, {spec.axis1.name: float(a), spec.axis2.name: float(b)}) for a in v1 for b in v2]
    mapper, pool = _mapper(_threads(opts))
    try:
        results = list(mapper(_sweep_cell, jobs))
    finally:
        if pool is not None:
            pool.shutdown()
    rows, errors = [], []
    for (job_cfg, ch), (vals, err) in zip(jobs, results):
        rows.append([ch[spec.axis1.name], ch[spec.axis2.name], *vals])
        if err:
            errors.append(f"{spec.axis1.name}={ch[spec.axis1.name]!r} {spec.axis2.name}={ch[spec.axis2.name]!r}: {err}")
    header = [f"{spec.axis1.name} [{_unit(spec.axis1.name)}]", f"{spec.axis2.name} [{_unit(spec.axis2.name)}]",
              "e_fil [1]", "log10_e_fil [1]", "entangled [bool]",
              "no_filter_margin [1]", "no_filter_condition [bool]",
              "with_filter_margin [1]", "with_filter_condition [bool]"]
    files = []
    if out:
        write_csv(out, header, rows)
        files.append(out)
        if errors:
            log = out.with_name(out.name + ".errors.log")
            log.write_text("\n".join(errors) + "\n")
            files.append(log)
    arr = np.array([r[2] for r in rows], dtype=float)
    return {"cells": len(rows), "failed": len(errors), "min_e_fil": float(np.nanmin(arr)) if arr.size else None,
            "entangled_cells": int(np.nansum(arr < 1.0))}, files


def cmd_finite_time(cfg, opts, out):
    tw = np.logspace(math.log10(opts["t_min_s"]), math.log10(opts["t_max_s"]), int(opts["count"]))
    ref = e_fil(cfg).e_fil
    rows = []
    for t in tw:
        grid = WindowedGridPoint.snap(cfg.omega_m, float(t))
        rep = error_budget(cfg, grid, int(opts["n0"]), opts["method"], e_fil_ref=ref)
        rows.append([grid.t_window, grid.n, grid.omega_n, rep.e_d, rep.e_fil_ref, rep.delta_sys,
                     rep.delta_stat_1, rep.n_runs, rep.delta_stat_n, rep.snr])
    header = ["t_window [s]", "n [1]", "omega_n [rad/s]", "e_d [1]", "e_fil [1]", "delta_sys [1]",
              "delta_stat_1 [1]", "n0 [1]", "delta_stat_n0 [1]", "snr [1]"]
    files = []
    if out:
        write_csv(out, header, rows)
        files.append(out)
    return {"rows": len(rows), "e_fil": ref}, files


def cmd_snr(cfg, opts, out):
    tt = np.logspace(opts["log10_t_min"], opts["log10_t_max"], int(opts["t_count"]))
    nn = np.arange(int(opts["n0_min"]), int(opts["n0_max"]) + 1)
    mapper, pool = _mapper(_threads(opts))
    try:
        table = snr_contour(cfg, tt, nn, method=opts["method"], level=opts["level"], mapper=mapper)
    finally:
        if pool is not None:
            pool.shutdown()
    rows = [[t, n, t / n, table.e_d[i, j], table.snr[i, j], table.snr[i, j] >= table.level]
            for i, t in enumerate(table.t_total) for j, n in enumerate(table.n0)]
    header = ["t_total [s]", "n0 [1]", "t_window [s]", "e_d [1]", "snr [1]", "above_level [bool]"]
    files = []
    if out:
        write_csv(out, header, rows)
        files.append(out)
    cross = table.level_crossing()
    best = float(np.nanmin(cross)) if np.any(np.isfinite(cross)) else None
    return {"level": table.level, "min_t_total_above_level": best,
            "n0_at_min": int(table.n0[int(np.nanargmin(cross))]) if best else None}, files


def cmd_time_to_snr(cfg, opts, out):
    t, n0 = time_to_snr(cfg, opts["target_snr"], int(opts["n0_max"]), method=opts["method"])
    summary = {"target_snr": opts["target_snr"], "t_total_s": t, "log10_t_total": math.log10(t), "n0": n0}
    files = []
    if out:
        write_csv(out, ["target_snr [1]", "t_total [s]", "log10_t_total [1]", "n0 [1]"],
                  [[opts["target_snr"], t, math.log10(t), n0]])
        files.append(out)
    return summary, files


def _omega_grid(cfg, opts):
    om = derive_mode_params(cfg, +1).omega
    return np.linspace(opts["w_min"] * om, opts["w_max"] * om, int(opts["count"]))


def cmd_spectra(cfg, opts, out):
    w = _omega_grid(cfg, opts)
    cols, header = [w], ["omega [rad/s]"]
    for s, tag in ((+1, "plus"), (-1, "minus")):
        sd = spectral_densities(derive_mode_params(cfg, s), w)
        cols += [sd.s_yy, sd.s_qy.real, sd.s_qy.imag, sd.s_py.real, sd.s_py.imag]
        header += [f"s_yy_{tag} [s]", f"re_s_qy_{tag} [s]", f"im_s_qy_{tag} [s]",
                   f"re_s_py_{tag} [s]", f"im_s_py_{tag} [s]"]
    files = []
    if out:
        write_csv(out, header, np.column_stack(cols).tolist())
        files.append(out)
    return {"rows": len(w)}, files


def cmd_filters(cfg, opts, out):
    w = _omega_grid(cfg, opts)
    cols, header = [w], ["omega [rad/s]"]
    for s, tag in ((+1, "plus"), (-1, "minus")):
        fr = wiener_filters(derive_mode_params(cfg, s), w)
        cols += [fr.h_q.real, fr.h_q.imag, fr.h_p.real, fr.h_p.imag]
        header += [f"re_h_q_{tag} [1]", f"im_h_q_{tag} [1]", f"re_h_p_{tag} [1]", f"im_h_p_{tag} [1]"]
    files = []
    if out:
        write_csv(out, header, np.column_stack(cols).tolist())
        files.append(out)
    return {"rows": len(w)}, files


def cmd_poles(cfg, opts, out):
    rows = []
    for s, tag in ((+1, "plus"), (-1, "minus")):
        for fam in integrand_poles(derive_mode_params(cfg, s)):
            for r in fam.roots:
                rows.append([tag, fam.name, r.real, r.imag, fam.residual])
    files = []
    if out:
        write_csv(out, ["mode", "family", "re_root [rad/s]", "im_root [rad/s]", "relative_residual [1]"], rows)
        files.append(out)
    return {"poles": len(rows), "max_residual": max(r[4] for r in rows)}, files


def cmd_feedback_bound(cfg, opts, out):
    b = fb_bounds(cfg, opts["margin"])
    g = b.g_cd_max if opts.get("g_cd") is None else opts["g_cd"]
    cond = fb_noise_condition(cfg, g)
    summary = {"margin": opts["margin"], "g_cd_max": b.g_cd_max, "gamma_m_eff_rad_s": b.gamma_m_eff,
               "gamma_m_eff_hz": b.gamma_m_eff / (2 * math.pi),
               "per_mode": {("plus" if s > 0 else "minus"): v for s, v in b.per_mode.items()},
               "noise_condition": dataclasses.asdict(cond), "g_cd_checked": g}
    files = []
    if out:
        write_csv(out, ["mode", "margin [1]", "g_cd_max [1]", "gamma_m_eff [rad/s]"],
                  [["plus" if s > 0 else "minus", opts["margin"], v[0], v[1]] for s, v in b.per_mode.items()])
        files.append(out)
    return summary, files


def cmd_oracle_validate(cfg, opts, out):
    from .oracle import SimConfig, ValidationPlan, dump_trajectories, run_validation, simulate

    plan = ValidationPlan(n_traj=int(opts["n_traj"]), seed=int(opts["seed"]), duration=float(opts["duration_s"]),
                          workers=_threads(opts))
    rep = run_validation(cfg, plan, feedback=bool(opts["feedback"]), step_check=bool(opts["step_check"]))
    files = []
    if out:
        write_csv(out, ["check", "analytic", "empirical", "tolerance", "kind", "passed [bool]", "note"],
                  [[c.name, c.analytic, c.empirical, c.tolerance, c.kind, c.passed, c.note] for c in rep.checks])
        files.append(out)
    if opts.get("dump"):
        sim = SimConfig(dt=plan.dt, duration=min(plan.duration, 1e6), burn_in=10.0 / cfg.gamma_m,
                        n_traj=1, seed=plan.seed)
        dump_trajectories(Path(opts["dump"]), simulate(cfg, sim))
        files.append(Path(opts["dump"]))
    summary = rep.to_dict()
    if not rep.passed:
        failed = [c.name for c in rep.checks if not c.passed]
        summary["failed"] = failed
    return summary, files


COMMANDS = {
    "entanglement": cmd_entanglement, "sweep": cmd_sweep, "finite-time": cmd_finite_time, "snr": cmd_snr,
    "time-to-snr": cmd_time_to_snr, "spectra": cmd_spectra, "filters": cmd_filters, "poles": cmd_poles,
    "feedback-bound": cmd_feedback_bound, "oracle-validate": cmd_oracle_validate,
}

# ------------------------------------------------------------- resolution


def reference_epsilon(cfg: ExperimentConfig) -> float:
    """Coupling at which the squeezed reference scenario (r = 1, phi = pi/2, 1e-10 W) gives E_Fil = 0.30."""
    ref = cfg.replace(squeeze_r=1.0, squeeze_phi_rad=math.pi / 2, laser_power_w=1e-10,
                      epsilon=0.0, separation_m=None)
    return calibrate_epsilon(ref, REFERENCE_E_FIL)


def _parse_axis(text: str) -> dict:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(f"axis must be name:min:max:count[:scale], got {text!r}")
    try:
        return {"name": parts[0], "min": float(parts[1]), "max": float(parts[2]), "count": int(parts[3]),
                "scale": parts[4] if len(parts) == 5 else "linear"}
    except ValueError as exc:
        raise ConfigError(f"bad axis {text!r}: {exc}") from exc


def resolve(command: str, args: argparse.Namespace) -> tuple[ExperimentConfig, dict]:
    """Merge preset < config file < flags into a config and an options dict."""
    data: dict = {}
    opts = dict(DEFAULTS[command])
    if args.preset:
        preset = PRESETS[args.preset]
        if preset["command"] != command:
            raise ConfigError(f"preset {args.preset} belongs to the {preset['command']} command")
        data.update(preset["config"])
        opts.update(preset["options"])
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        # the coupling may be left to calibration, so validate with a placeholder
        _, extras = config_from_dict({"grav_coupling": {"epsilon": 0.0}, **raw}, ("options",))
        data.update({k: v for k, v in raw.items() if k != "options"})
        file_opts = extras.get("options", {})
        if not isinstance(file_opts, dict):
            raise ConfigError("options must be a JSON object")
        unknown = set(file_opts) - set(opts) - {"threads"}
        if unknown:
            raise ConfigError(f"unknown options for {command}: {sorted(unknown)}")
        opts.update(file_opts)
    flag_cfg = {"squeeze_r": args.r, "squeeze_phi_rad": args.phi, "laser_power_w": args.pin_w}
    data.update({k: v for k, v in flag_cfg.items() if v is not None})
    coupling = None
    if args.epsilon is not None and args.sep_m is not None:
        raise ConfigError("give either --epsilon or --sep-m, not both")
    if args.sep_m is not None:
        coupling = {"separation_m": args.sep_m}
    elif args.epsilon is not None:
        coupling = args.epsilon
    elif "grav_coupling" not in data:
        coupling = "calibrated"
    if coupling == "calibrated":
        data["grav_coupling"] = {"epsilon": 0.0}
        cfg, _ = config_from_dict(data)
        data["grav_coupling"] = {"epsilon": reference_epsilon(cfg)}
    elif coupling is not None:
        if not isinstance(coupling, dict):
            try:
                coupling = {"epsilon": float(coupling)}
            except ValueError as exc:
                raise ConfigError(f"--epsilon must be a number or 'calibrated', got {coupling!r}") from exc
        data["grav_coupling"] = coupling
    cfg, _ = config_from_dict(data)
    if args.threads is not None:
        opts["threads"] = args.threads
    if args.seed is not None:
        opts["seed"] = args.seed
    if args.n0 is not None:
        key = "n0_max" if command == "time-to-snr" else "n0"
        if command == "snr":
            opts["n0_min"] = opts["n0_max"] = args.n0
        elif key in opts:
            opts[key] = args.n0
    if args.t_total_s is not None:
        if command != "snr":
            raise ConfigError("--t-total-s only applies to the snr command")
        opts["log10_t_min"] = opts["log10_t_max"] = math.log10(args.t_total_s)
        opts["t_count"] = 1
    for key in ("axis1", "axis2"):
        v = getattr(args, key, None)
        if v:
            opts[key] = _parse_axis(v)
    for key in ("n_traj", "duration_s", "margin", "g_cd", "target_snr", "method", "dump"):
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = v
    if getattr(args, "quick", False):
        opts.update({"n_traj": 20, "duration_s": 2e6, "feedback": False, "step_check": False})
    return cfg, opts


def execute(command: str, cfg: ExperimentConfig, opts: dict, out: Path | None, preset: str | None = None):
    start = time.perf_counter()
    summary, files = COMMANDS[command](cfg, opts, out)
    wall = time.perf_counter() - start
    if out:
        manifest = {"tool": "squeezed_gie", "version": __version__, "command": command, "preset": preset,
                    "config": cfg.to_dict(), "options": _jsonable({k: v for k, v in opts.items() if k != "threads"}),
                    "outputs": [str(f) for f in files], "wall_time_s": wall, "numpy": np.__version__}
        mpath = out.with_name(out.name + ".manifest.json")
        mpath.write_text(json.dumps(_jsonable(manifest), indent=2) + "\n")
    return summary


def replay(manifest_path: str, out: Path | None, threads: int | None = None):
    try:
        m = json.loads(Path(manifest_path).read_text())
        command, opts = m["command"], dict(m["options"])
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read manifest {manifest_path}: {exc}") from exc
    if command not in COMMANDS:
        raise ConfigError(f"manifest names an unknown command {command!r}")
    cfg, _ = config_from_dict(m["config"])
    if threads is not None:
        opts["threads"] = threads
    target = out if out is not None else Path(m["outputs"][0]) if m.get("outputs") else None
    return command, execute(command, cfg, opts, target, m.get("preset"))


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gie", description="Gravity-induced entanglement with squeezed light and Wiener filtering.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--out", type=Path, help="CSV output path (manifest written beside it)")
    common.add_argument("--epsilon", help="gravitational coupling, or 'calibrated'")
    common.add_argument("--sep-m", dest="sep_m", type=float, help="mirror separation L [m]")
    common.add_argument("--r", type=float, help="squeezing strength")
    common.add_argument("--phi", type=float, help="squeezing phase [rad]")
    common.add_argument("--pin-w", dest="pin_w", type=float, help="input laser power [W]")
    common.add_argument("--n0", type=int, help="number of measurement runs")
    common.add_argument("--t-total-s", dest="t_total_s", type=float, help="total measurement time [s]")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help=f"worker processes (fallback: ${THREADS_ENV})")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sweep":
            sp.add_argument("--axis1", help="name:min:max:count[:linear|log]")
            sp.add_argument("--axis2", help="name:min:max:count[:linear|log]")
        if name in ("finite-time", "snr", "time-to-snr"):
            sp.add_argument("--method", choices=["residue", "quad"])
        if name == "time-to-snr":
            sp.add_argument("--target-snr", dest="target_snr", type=float)
        if name == "feedback-bound":
            sp.add_argument("--margin", type=float)
            sp.add_argument("--g-cd", dest="g_cd", type=float)
        if name == "oracle-validate":
            sp.add_argument("--n-traj", dest="n_traj", type=int)
            sp.add_argument("--duration-s", dest="duration_s", type=float)
            sp.add_argument("--quick", action="store_true", help="small smoke run (20 trajectories)")
            sp.add_argument("--dump", help="write one raw trajectory as binary columns")
    rp = sub.add_parser("replay", help="re-run a manifest")
    rp.add_argument("manifest")
    rp.add_argument("--out", type=Path)
    rp.add_argument("--threads", type=int)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "replay":
            command, summary = replay(args.manifest, args.out, args.threads)
        else:
            command = args.command
            cfg, opts = resolve(command, args)
            summary = execute(command, cfg, opts, args.out, args.preset)
        print(json.dumps(_jsonable(summary), indent=2))
        if command == "oracle-validate" and "failed" in summary:
            err = {"error": "OracleMismatch", "message": f"checks failed: {summary['failed']}", "exit_code": 3}
            print(json.dumps(err), file=sys.stderr)
            return 3
        return 0
    except GIEError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}),
              file=sys.stderr)
        return exc.exit_code
    except (json.JSONDecodeError, OSError) as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc), "exit_code": 1}), file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": 3}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
