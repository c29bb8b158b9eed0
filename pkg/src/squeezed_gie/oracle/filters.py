"""Causal FIR discretisation of the Wiener filters for step-averaged records.

Tap j is the exact integral of the closed-form impulse response over
[j dt, (j+1) dt]; the estimate at step edge t_k is sum_j h_j Y_{k-1-j},
which only uses the record up to t_k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from ..errors import ResolutionError
from ..params import ModeParams
from ..wiener import filter_coefficients, wiener_filters


@dataclass(frozen=True)
class DiscreteFilter:
    which: str
    dt: float
    taps: np.ndarray      # h_j for lags j = 0 .. n-1 (negative lags are zero)
    max_rel_error: float  # worst |G - H|/|H| over |w| <= check_span

    @property
    def n_taps(self) -> int:
        return len(self.taps)

    def response(self, omega):
        """Frequency response of the FIR acting on step-averaged input, referred to H(w)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        j = np.arange(self.n_taps)
        ph = np.exp(1j * np.outer(w, j) * self.dt) @ self.taps
        wd = w * self.dt
        avg = np.where(np.abs(wd) > 1e-12, (np.exp(1j * wd) - 1.0) / (1j * np.where(wd == 0, 1, wd)), 1.0)
        return ph * avg

    def apply(self, record: np.ndarray) -> np.ndarray:
        """Estimates at step edges k = 1 .. n (same length as ``record``), causal."""
        return fftconvolve(record, self.taps[None, :] if record.ndim == 2 else self.taps,
                           mode="full", axes=-1)[..., : record.shape[-1]]


def _bin_integrals(mode: ModeParams, which: str, dt: float, n: int) -> np.ndarray:
    b0, b1 = filter_coefficients(mode)[which]
    s1, s2 = np.roots([1.0 + 0j, mode.gamma_y, mode.omega_y**2])
    j = np.arange(n)
    out = np.zeros(n, dtype=complex)
    for s, c in ((s1, (b0 + b1 * s1) / (s1 - s2)), (s2, (b0 + b1 * s2) / (s2 - s1))):
        out += c * np.exp(s * j * dt) * np.expm1(s * dt) / s
    return out.real


def discrete_wiener(mode: ModeParams, dt: float, which: str = "q", taps: int | None = None,
                    check_span: float = 5.0, tolerance: float = 0.01, n_check: int = 2001) -> DiscreteFilter:
    """FIR taps of H_q or H_p at step ``dt``.

    Raises ResolutionError when the sample rate is below 100 omega_Y/2pi, the tap
    count is below 10/(gamma_Y dt), or the response misses the closed form by
    more than ``tolerance`` anywhere on |w| <= check_span * Omega.
    """
    if which not in ("q", "p"):
        raise ValueError(f"which must be 'q' or 'p', got {which!r}")
    if 1.0 / dt < 100.0 * mode.omega_y / (2.0 * math.pi):
        raise ResolutionError(f"sample rate {1 / dt} Hz below 100 omega_Y/2pi")
    n_min = math.ceil(10.0 / (mode.gamma_y * dt))
    n = math.ceil(20.0 / (mode.gamma_y * dt)) if taps is None else int(taps)
    if n < n_min:
        raise ResolutionError(f"{n} taps below the 10/(gamma_Y dt) = {n_min} minimum")
    h = _bin_integrals(mode, which, dt, n)
    w = np.linspace(-check_span * mode.omega, check_span * mode.omega, n_check)
    exact = getattr(wiener_filters(mode, w), f"h_{which}")
    trial = DiscreteFilter(which, dt, h, 0.0)
    err = float(np.max(np.abs(trial.response(w) - exact) / np.abs(exact)))
    if err > tolerance:
        raise ResolutionError(f"FIR response misses H_{which} by {err:.3g} (> {tolerance}) with {n} taps")
    return DiscreteFilter(which, dt, h, err)
