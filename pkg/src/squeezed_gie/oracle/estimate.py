"""Empirical finite-time statistics and spectra from simulated records."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import welch

from ..errors import ConfigError, ResolutionError
from ..finitetime import WindowedGridPoint, windowed_moments
from ..params import ExperimentConfig, derive_mode_params
from .filters import DiscreteFilter, discrete_wiener
from .simulate import TrajectorySet


def filtered_residual(state: np.ndarray, record: np.ndarray, filt: DiscreteFilter) -> np.ndarray:
    """state_k - (H o Y)(t_k) at step edges k = 1..n, dropping the first n_taps edges."""
    est = filt.apply(record)
    res = state[..., 1:] - est
    return res[..., filt.n_taps:]


def window_quadratures(x: np.ndarray, dt: float, grid: WindowedGridPoint, imag: bool = False) -> np.ndarray:
    """R = Re Z over consecutive non-overlapping windows, Z = T^-1/2 int x e^{i w_n (t - t_c)} dt.

    Returns a flat array of one value per window (and per trajectory);
    ``imag=True`` also appends Im Z, the other quadrature.
    """
    n_win = grid.t_window / dt
    if abs(n_win - round(n_win)) > 1e-9 * n_win:
        raise ResolutionError(f"window {grid.t_window} s is not a whole number of {dt} s steps")
    n_win = int(round(n_win))
    x = np.atleast_2d(x)
    m = x.shape[-1] // n_win
    if m < 1:
        raise ConfigError(f"record of {x.shape[-1] * dt} s is shorter than the window {grid.t_window} s")
    blocks = x[:, : m * n_win].reshape(x.shape[0], m, n_win)
    tk = (np.arange(n_win) - (n_win - 1) / 2.0) * dt
    z = blocks @ np.exp(1j * grid.omega_n * tk) * dt / math.sqrt(grid.t_window)
    z = z.ravel()
    return np.concatenate([z.real, z.imag]) if imag else z.real


@dataclass(frozen=True)
class FiniteTimeEstimate:
    grid: WindowedGridPoint
    n_samples: int
    rq2: float             # <R_q~+^2>
    rp2: float             # <R_p~-^2>
    fourth_q: float        # <R^4>/<R^2>^2, 3 for Gaussian statistics
    fourth_p: float
    comm_sq: float         # analytic finite-T commutator denominator
    freq_ratio: float
    e_d_hat: float
    stat_spread: float     # ensemble std of the single-window estimator

    @property
    def standard_error(self) -> float:
        return self.stat_spread / math.sqrt(self.n_samples)


def moments_from_quadratures(rq: np.ndarray, rp: np.ndarray, grid: WindowedGridPoint,
                             comm_sq: float, freq_ratio: float) -> FiniteTimeEstimate:
    rq, rp = np.asarray(rq), np.asarray(rp)
    if rq.shape != rp.shape:
        raise ValueError("q and p quadratures must pair window by window")
    q2, p2 = np.mean(rq**2), np.mean(rp**2)
    single = rq**2 * rp**2 * freq_ratio / comm_sq
    return FiniteTimeEstimate(
        grid=grid, n_samples=rq.size, rq2=float(q2), rp2=float(p2),
        fourth_q=float(np.mean(rq**4) / q2**2), fourth_p=float(np.mean(rp**4) / p2**2),
        comm_sq=comm_sq, freq_ratio=freq_ratio, e_d_hat=float(q2 * p2 * freq_ratio / comm_sq),
        stat_spread=float(np.std(single, ddof=1)))


def residual_pair(cfg: ExperimentConfig, traj: TrajectorySet, filters: dict | None = None):
    """(q~_+, p~_-) filtered residual records of a trajectory set."""
    if not {+1, -1} <= set(traj.y):
        raise ConfigError("both modes are needed for the entanglement estimator")
    if filters is None:
        filters = default_filters(cfg, traj.dt)
    qres = filtered_residual(traj.q[+1], traj.y[+1], filters[+1, "q"])
    pres = filtered_residual(traj.p[-1], traj.y[-1], filters[-1, "p"])
    n = min(qres.shape[-1], pres.shape[-1])
    return qres[..., :n], pres[..., :n]


def default_filters(cfg: ExperimentConfig, dt: float) -> dict:
    out = {}
    for s in (+1, -1):
        mode = derive_mode_params(cfg, s)
        for which in ("q", "p"):
            out[s, which] = discrete_wiener(mode, dt, which)
    return out


def empirical_finite_time(cfg: ExperimentConfig, traj: TrajectorySet, grid: WindowedGridPoint,
                          filters: dict | None = None, method: str = "residue") -> FiniteTimeEstimate:
    """Windowed moments of filtered records and the resulting entanglement estimate."""
    qres, pres = residual_pair(cfg, traj, filters)
    rq = window_quadratures(qres, traj.dt, grid)
    rp = window_quadratures(pres, traj.dt, grid)
    wm = windowed_moments(cfg, grid, method=method)
    return moments_from_quadratures(rq, rp, grid, wm.comm_sq, wm.freq_ratio)


def psd(x: np.ndarray, dt: float, segment: float):
    """Two-sided Welch density in the symmetrised convention, averaged over rows.

    Returns (omega, S) with S(omega) = int <x(t) x(0)> e^{i omega t} dt.
    """
    nper = int(round(segment / dt))
    f, p = welch(np.atleast_2d(x), fs=1.0 / dt, window="hann", nperseg=nper, noverlap=nper // 2,
                 detrend=False, return_onesided=False, scaling="density", axis=-1)
    return 2.0 * math.pi * f, np.mean(p, axis=0)


@dataclass
class PSDAccumulator:
    """Running mean of Welch densities over independent records."""

    dt: float
    segment: float
    total: np.ndarray | None = None
    omega: np.ndarray | None = None
    count: int = 0

    def add(self, x: np.ndarray):
        x = np.atleast_2d(x)
        w, s = psd(x, self.dt, self.segment)
        self.omega = w
        self.total = s * x.shape[0] if self.total is None else self.total + s * x.shape[0]
        self.count += x.shape[0]

    def at(self, omega: float) -> tuple[float, float]:
        """(bin frequency, density) at the bin nearest ``omega``."""
        k = int(np.argmin(np.abs(self.omega - omega)))
        return float(self.omega[k]), float(self.total[k] / self.count)
