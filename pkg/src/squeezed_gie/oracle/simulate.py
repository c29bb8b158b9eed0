"""Time-domain integration of one adiabatic optomechanical mode.

    dq/dt = Omega p
    dp/dt = -Omega q - gamma_m p + sqrt(2 gamma_m) p_in - alpha x_in
    Y     = alpha q - y_in,               alpha = 4 g/sqrt(kappa)

One step is x_{k+1} = Phi(dt) x_k + Phi(dt/2) (0, f_k dt): the deterministic
rotation is exact (exponential integrator) and the step-averaged force f_k
is injected at the midpoint.  The recursion is linear and time-invariant,
so it is run as a second-order IIR filter per state component.  The record
Y_k is the step average alpha (q_k + q_{k+1})/2 - y_k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from ..errors import ConfigError
from ..params import ExperimentConfig, ModeParams, derive_mode_params
from .noise import NoiseDraw, draw_noise, stream_rng

_SIGNS = {"+": (+1,), "-": (-1,), "both": (+1, -1)}


@dataclass(frozen=True)
class SimConfig:
    dt: float
    duration: float
    burn_in: float
    n_traj: int = 1
    seed: int = 0
    mode: str = "both"
    first_index: int = 0

    def __post_init__(self):
        if self.mode not in _SIGNS:
            raise ConfigError(f"mode must be one of {sorted(_SIGNS)}, got {self.mode!r}")
        if not (self.dt > 0 and self.duration > 0 and self.burn_in >= 0):
            raise ConfigError("dt and duration must be positive, burn_in non-negative")
        if int(self.n_traj) != self.n_traj or self.n_traj < 1:
            raise ConfigError(f"n_traj must be a positive integer, got {self.n_traj!r}")

    @property
    def signs(self) -> tuple[int, ...]:
        return _SIGNS[self.mode]

    @property
    def n_burn(self) -> int:
        return int(round(self.burn_in / self.dt))

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def validate_for(self, cfg: ExperimentConfig, window: float | None = None):
        """Check the invariants that depend on the physical configuration."""
        omega_max = max(derive_mode_params(cfg, s).omega for s in self.signs)
        if self.dt > 2.0 * math.pi / omega_max / 200.0 * (1 + 1e-12):
            raise ConfigError(f"dt = {self.dt} s exceeds a 200th of the shortest period")
        if self.burn_in < 10.0 / cfg.gamma_m * (1 - 1e-12):
            raise ConfigError(f"burn_in = {self.burn_in} s is shorter than 10/gamma_m")
        if window is not None and self.duration < window:
            raise ConfigError(f"duration = {self.duration} s is shorter than the window {window} s")


def propagator(mode: ModeParams, tau) -> np.ndarray:
    """exp(A tau) for A = [[0, Omega], [-Omega, -gamma_m]]; shape (..., 2, 2)."""
    om, gm = mode.omega, mode.gamma_m
    wd = math.sqrt(om**2 - gm**2 / 4.0)
    tau = np.asarray(tau, dtype=float)
    e = np.exp(-gm * tau / 2.0)
    c, s = np.cos(wd * tau), np.sin(wd * tau) / wd
    out = np.empty(tau.shape + (2, 2))
    out[..., 0, 0] = e * (c + s * gm / 2.0)
    out[..., 0, 1] = e * s * om
    out[..., 1, 0] = -e * s * om
    out[..., 1, 1] = e * (c - s * gm / 2.0)
    return out


def step_filters(mode: ModeParams, dt: float):
    """IIR coefficients (b_q, b_p, a) mapping step-averaged force to (q_k, p_k)."""
    phi = propagator(mode, dt)
    v = propagator(mode, dt / 2.0)[:, 1] * dt
    a = np.array([1.0, -np.trace(phi), np.linalg.det(phi)])
    bq = np.array([0.0, v[0], phi[0, 1] * v[1] - phi[1, 1] * v[0]])
    bp = np.array([0.0, v[1], phi[1, 0] * v[0] - phi[0, 0] * v[1]])
    return bq, bp, a


def integrate(mode: ModeParams, noise: NoiseDraw, x0=(0.0, 0.0)):
    """Return (q, p, y_rec): q, p at the n+1 step edges, y_rec the n step averages."""
    dt = noise.dt
    force = math.sqrt(2.0 * mode.gamma_m) * noise.p_in - mode.alpha * noise.x_in
    pad = np.zeros(force.shape[:-1] + (1,))
    force = np.concatenate([force, pad], axis=-1)
    bq, bp, a = step_filters(mode, dt)
    q = lfilter(bq, a, force, axis=-1)
    p = lfilter(bp, a, force, axis=-1)
    if np.any(np.asarray(x0) != 0):
        free = propagator(mode, dt * np.arange(force.shape[-1])) @ np.asarray(x0, dtype=float)
        q = q + free[:, 0]
        p = p + free[:, 1]
    y_rec = mode.alpha * 0.5 * (q[..., :-1] + q[..., 1:]) - noise.y_in
    return q, p, y_rec


@dataclass
class TrajectorySet:
    """Post-burn-in records of a batch of trajectories, keyed by mode sign.

    q[s], p[s] have shape (n_traj, n_steps + 1); y[s] has shape (n_traj, n_steps).
    Time zero is the end of the burn-in.
    """

    dt: float
    indices: np.ndarray
    q: dict = field(default_factory=dict)
    p: dict = field(default_factory=dict)
    y: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return next(iter(self.y.values())).shape[-1]

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)


def simulate_one(cfg: ExperimentConfig, sim: SimConfig, index: int, sign: int):
    """(q, p, y_rec) of trajectory ``index`` for one mode, burn-in removed."""
    mode = derive_mode_params(cfg, sign)
    n0, n = sim.n_burn, sim.n_steps
    noise = draw_noise(mode, n0 + n, sim.dt, stream_rng(sim.seed, index, sign))
    q, p, y = integrate(mode, noise)
    return q[n0:], p[n0:], y[n0:]


def simulate(cfg: ExperimentConfig, sim: SimConfig, window: float | None = None) -> TrajectorySet:
    sim.validate_for(cfg, window)
    idx = sim.first_index + np.arange(sim.n_traj)
    out = TrajectorySet(dt=sim.dt, indices=idx)
    for s in sim.signs:
        rows = [simulate_one(cfg, sim, int(i), s) for i in idx]
        out.q[s] = np.stack([r[0] for r in rows])
        out.p[s] = np.stack([r[1] for r in rows])
        out.y[s] = np.stack([r[2] for r in rows])
    return out


def dump_trajectories(path, traj: TrajectorySet, index: int = 0):
    """Write one trajectory as little-endian float64 columns after a text header line.

    Columns: t, then q, p at the step edges and Y on the step (NaN-padded last row)
    for every simulated mode.
    """
    n = traj.n_steps + 1
    cols, names = [traj.t], ["t_s"]
    for s in sorted(traj.q, reverse=True):
        tag = "plus" if s > 0 else "minus"
        y = np.append(traj.y[s][index], np.nan)
        cols += [traj.q[s][index], traj.p[s][index], y]
        names += [f"q_{tag}", f"p_{tag}", f"Y_{tag}"]
    data = np.column_stack(cols).astype("<f8")
    assert data.shape[0] == n
    header = f"# dt={traj.dt!r} rows={n} columns={','.join(names)}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(data.tobytes(order="C"))


def load_dump(path):
    """Inverse of :func:`dump_trajectories`: (dt, {column: array})."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        raw = fh.read()
    meta = dict(item.split("=", 1) for item in header.lstrip("# ").split())
    names = meta["columns"].split(",")
    data = np.frombuffer(raw, dtype="<f8").reshape(int(meta["rows"]), len(names))
    return float(meta["dt"]), {k: data[:, i].copy() for i, k in enumerate(names)}
