"""Seed-fixed Monte Carlo cross-check of the analytic pipeline.

Each trajectory is an independent job; the per-trajectory statistics are
reduced in trajectory order, so serial and pooled runs give identical numbers.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .._rational import Rational
from ..entanglement import correlator_rationals
from ..feedback import FeedbackParams, fb_sqq
from ..finitetime import WindowedGridPoint, windowed_moments
from ..params import ExperimentConfig, derive_mode_params
from ..spectra import position_variance, spectral_densities
from .estimate import (default_filters, filtered_residual, moments_from_quadratures, psd,
                       window_quadratures)
from .feedback_sim import simulate_feedback
from .noise import draw_noise, stream_rng
from .simulate import SimConfig, integrate, simulate_one


@dataclass(frozen=True)
class ValidationPlan:
    n_traj: int = 200
    seed: int = 20240611
    dt: float = 5.0
    duration: float = 1.6e7
    burn_in: float | None = None          # default 10/gamma_m
    window: float = 1e5
    segment_y: float = 2e6
    segment_q: float = 1e6
    segment_p: float = 4e5
    fb_traj: int = 60
    fb_duration: float = 2e7
    fb_gain: float = 0.6
    fb_bandwidth: float = 20.0            # omega_fb in units of Omega_+
    step_traj: int = 10
    step_duration: float = 1e7
    workers: int = 1


@dataclass(frozen=True)
class Check:
    name: str
    analytic: float
    empirical: float
    tolerance: float
    kind: str             # "rel": |emp/ana - 1| <= tol; "abs": |emp - ana| <= tol
    passed: bool
    note: str = ""


@dataclass
class OracleValidation:
    plan: ValidationPlan
    checks: list = field(default_factory=list)
    transient: float = 0.0     # residual relaxation factor exp(-gamma_m burn_in)
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {"plan": asdict(self.plan), "transient": self.transient, "wall_time_s": self.wall_time_s,
                "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def _rel(name, ana, emp, tol, note=""):
    return Check(name, float(ana), float(emp), tol, "rel", bool(abs(emp / ana - 1.0) <= tol), note)


def _abs(name, ana, emp, tol, note=""):
    return Check(name, float(ana), float(emp), tol, "abs", bool(abs(emp - ana) <= tol), note)


def stationary_variance(rat: Rational) -> float:
    """(1/pi) int rat(w) dw by residues: the variance whose spectrum is 2 rat(w)."""
    return float((2j * sum(rat.residue(p) for p in rat.poles() if p.imag > 0)).real)


def _bin(omega, target):
    return int(np.argmin(np.abs(omega - target)))


def _trajectory_stats(args):
    cfg, sim, plan, index, filters, grid = args
    om = derive_mode_params(cfg, +1).omega
    qp, _, yp = simulate_one(cfg, sim, index, +1)
    _, pm, ym = simulate_one(cfg, sim, index, -1)
    qres = filtered_residual(qp, yp, filters[+1, "q"])
    pres = filtered_residual(pm, ym, filters[-1, "p"])
    n = min(qres.size, pres.size)
    out = {"q2": float(np.mean(qp**2)), "qres2": float(np.mean(qres**2)), "pres2": float(np.mean(pres**2)),
           "rq": window_quadratures(qres[:n], sim.dt, grid), "rp": window_quadratures(pres[:n], sim.dt, grid)}
    for key, x, seg in (("syy", yp, plan.segment_y), ("sqq", qres, plan.segment_q), ("spp", pres, plan.segment_p)):
        w, s = psd(x, sim.dt, seg)
        k = _bin(w, om)
        out[key] = (float(w[k]), float(s[k]))
    return out


def _feedback_stats(args):
    cfg, fb, plan, index = args
    om = derive_mode_params(cfg, +1).omega
    burn = int(round(10.0 / max(fb_gamma(cfg, fb), 1e-300) / plan.dt))
    q = simulate_feedback(cfg, fb, plan.dt, int(round(plan.fb_duration / plan.dt)), plan.seed, index, burn)
    w, s = psd(q, plan.dt, plan.segment_y)
    k = _bin(w, om)
    return float(w[k]), float(s[k])


def fb_gamma(cfg: ExperimentConfig, fb: FeedbackParams) -> float:
    mode = derive_mode_params(cfg, +1)
    return cfg.big_gamma + mode.alpha * mode.omega * fb.g_cd


def _step_stats(args):
    cfg, plan, index = args
    mode = derive_mode_params(cfg, +1)
    fine_dt = plan.dt / 2.0
    n0 = int(round(10.0 / cfg.gamma_m / plan.dt))
    n = int(round(plan.step_duration / plan.dt))
    fine = draw_noise(mode, 2 * (n0 + n), fine_dt, stream_rng(plan.seed + 1, index, +1))
    out = []
    for noise, skip in ((fine, 2 * n0), (fine.coarsen(2), n0)):
        _, _, y = integrate(mode, noise)
        w, s = psd(y[skip:], noise.dt, plan.segment_y)
        out.append(float(s[_bin(w, mode.omega)]))
    return out


def _map(fn, jobs, workers):
    if workers <= 1:
        return map(fn, jobs)
    pool = ProcessPoolExecutor(max_workers=workers)
    return pool.map(fn, jobs, chunksize=1)


def run_validation(cfg: ExperimentConfig, plan: ValidationPlan = ValidationPlan(),
                   feedback: bool = True, step_check: bool = True) -> OracleValidation:
    start = time.perf_counter()
    mp, mm = derive_mode_params(cfg, +1), derive_mode_params(cfg, -1)
    burn = 10.0 / cfg.gamma_m if plan.burn_in is None else plan.burn_in
    filters = default_filters(cfg, plan.dt)
    history = max(f.n_taps for f in filters.values()) * plan.dt
    sim = SimConfig(dt=plan.dt, duration=plan.duration + history, burn_in=burn,
                    n_traj=plan.n_traj, seed=plan.seed, mode="both")
    sim.validate_for(cfg, plan.window)
    grid = WindowedGridPoint.snap(mp.omega, plan.window)
    report = OracleValidation(plan=plan, transient=math.exp(-cfg.gamma_m * burn))

    jobs = ((cfg, sim, plan, i, filters, grid) for i in range(plan.n_traj))
    acc = {"q2": 0.0, "qres2": 0.0, "pres2": 0.0, "syy": 0.0, "sqq": 0.0, "spp": 0.0}
    rq, rp, freqs = [], [], {}
    for st in _map(_trajectory_stats, jobs, plan.workers):
        for key in ("q2", "qres2", "pres2"):
            acc[key] += st[key]
        for key in ("syy", "sqq", "spp"):
            freqs[key] = st[key][0]
            acc[key] += st[key][1]
        rq.append(st["rq"])
        rp.append(st["rp"])
    n = plan.n_traj
    rats_p, rats_m = correlator_rationals(mp), correlator_rationals(mm)
    checks = report.checks
    checks.append(_rel("var_q_plus", position_variance(mp), acc["q2"] / n, 0.05))
    w = freqs["syy"]
    checks.append(_rel("s_yy_plus", spectral_densities(mp, w).s_yy, acc["syy"] / n, 0.05,
                       f"Welch bin at {w:.9g} rad/s"))
    w = freqs["sqq"]
    checks.append(_rel("rq2_plus", rats_p["rq2"](w).real, acc["sqq"] / n / 2.0, 0.05,
                       "half the Welch density of q~_+"))
    w = freqs["spp"]
    checks.append(_rel("rp2_minus", rats_m["rp2"](w).real, acc["spp"] / n / 2.0, 0.05,
                       "half the Welch density of p~_-"))
    checks.append(_rel("residual_var_q_plus", stationary_variance(rats_p["rq2"]), acc["qres2"] / n, 0.05))
    checks.append(_rel("residual_var_p_minus", stationary_variance(rats_m["rp2"]), acc["pres2"] / n, 0.05))

    wm = windowed_moments(cfg, grid, method="residue")
    est = moments_from_quadratures(np.concatenate(rq), np.concatenate(rp), grid, wm.comm_sq, wm.freq_ratio)
    checks.append(_abs("e_d", wm.e_d, est.e_d_hat, 2.0 * est.stat_spread / math.sqrt(est.n_samples),
                       f"T = {grid.t_window:g} s, {est.n_samples} windows"))
    checks.append(_abs("fourth_moment_q", 3.0, est.fourth_q, 0.1))
    checks.append(_abs("fourth_moment_p", 3.0, est.fourth_p, 0.1))
    checks.append(_rel("stat_spread_ratio", 2.0 * math.sqrt(2.0), est.stat_spread / est.e_d_hat, 0.1))

    if feedback:
        fb = FeedbackParams(g_cd=plan.fb_gain, omega_fb=plan.fb_bandwidth * mp.omega)
        tot = 0.0
        for wk, s in _map(_feedback_stats, ((cfg, fb, plan, i) for i in range(plan.fb_traj)), plan.workers):
            tot += s
        checks.append(_rel("feedback_s_qq", fb_sqq(cfg, fb, wk), tot / plan.fb_traj, 0.10,
                           f"g_cd = {fb.g_cd}, omega_fb = {plan.fb_bandwidth:g} Omega_+"))
    if step_check:
        fine = coarse = 0.0
        for a, b in _map(_step_stats, ((cfg, plan, i) for i in range(plan.step_traj)), plan.workers):
            fine += a
            coarse += b
        checks.append(_rel("step_halving", fine, coarse, 0.01, "S_YY(Omega_+) at dt vs dt/2, common noise"))
    report.wall_time_s = time.perf_counter() - start
    return report
