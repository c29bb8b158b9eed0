"""Causal Wiener filters for the mode quadratures and their numerical checks.

Both filters share the denominator F'(w) = omega_Y^2 - i gamma_Y w - w^2.
Writing s = -i w (so that s <-> d/dt), each filter is (b0 + b1 s)/(s^2 + gamma_Y s + omega_Y^2).

Time/frequency convention: x(t) = int dw/2pi x(w) exp(-i w t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from numpy.polynomial import Polynomial

from ._rational import Rational, causal_tail_time, tail_values
from .errors import GridError
from .params import ModeParams
from .spectra import spectral_rationals, susceptibility


@dataclass(frozen=True)
class FilterResponse:
    omega: np.ndarray | float
    h_q: np.ndarray | complex
    h_p: np.ndarray | complex


def filter_coefficients(mode: ModeParams) -> dict[str, tuple[float, float]]:
    """Numerator coefficients (b0, b1) of H_q and H_p in the variable s = -i w."""
    if mode.g == 0:
        return {"q": (0.0, 0.0), "p": (0.0, 0.0)}
    k = math.sqrt(mode.kappa) / (4.0 * mode.g)
    dg, dw2 = mode.dgamma, mode.domega2
    return {
        "q": (k * dw2, k * dg),
        "p": (-k * dg * mode.omega, k * (dw2 - dg * mode.gamma_m) / mode.omega),
    }


def wiener_filters(mode: ModeParams, omega) -> FilterResponse:
    w = np.asarray(omega, dtype=float)
    _, fp = susceptibility(mode, w)
    s = -1j * w
    c = filter_coefficients(mode)
    h_q = (c["q"][0] + c["q"][1] * s) / fp
    h_p = (c["p"][0] + c["p"][1] * s) / fp
    return FilterResponse(omega=w, h_q=h_q, h_p=h_p)


def filter_poles(mode: ModeParams) -> np.ndarray:
    """Roots of F'(w) in the complex w plane."""
    s = np.roots([1.0, mode.gamma_y, mode.omega_y**2])
    return 1j * s


def impulse_response(mode: ModeParams, t, which: str = "q"):
    """Closed-form h(t) = int dw/2pi H(w) exp(-i w t); zero for t < 0."""
    t = np.asarray(t, dtype=float)
    b0, b1 = filter_coefficients(mode)[which]
    s1, s2 = np.roots([1.0 + 0j, mode.gamma_y, mode.omega_y**2])
    if abs(s1 - s2) < 1e-12 * abs(s1):
        raise GridError("critically damped filter: repeated pole, residue form not defined")
    tp = np.where(t >= 0, t, 0.0)
    h = ((b0 + b1 * s1) / (s1 - s2) * np.exp(s1 * tp) + (b0 + b1 * s2) / (s2 - s1) * np.exp(s2 * tp))
    return np.where(t >= 0, h.real, 0.0)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of ``n_points`` angular frequencies on [-half_span, half_span)."""

    n_points: int
    half_span: float

    @classmethod
    def default_for(cls, mode: ModeParams, n_points: int = 2**20, span_factor: float = 2**10):
        return cls(n_points=n_points, half_span=span_factor * abs(mode.gamma_y))

    @property
    def domega(self) -> float:
        return 2.0 * self.half_span / self.n_points

    @property
    def omega(self) -> np.ndarray:
        return -self.half_span + self.domega * np.arange(self.n_points)

    @property
    def dt(self) -> float:
        return math.pi / self.half_span

    @property
    def t(self) -> np.ndarray:
        j = np.arange(self.n_points)
        return np.where(j < self.n_points // 2, j, j - self.n_points) * self.dt


def _inverse_transform(values: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """Samples of int dw/2pi X(w) exp(-i w t) at grid.t (FFT ordering)."""
    j = np.arange(grid.n_points)
    phase = np.where(j % 2 == 0, 1.0, -1.0)  # exp(i W t_j) with W t_j = pi j
    return grid.domega / (2.0 * math.pi) * phase * np.fft.fft(values)


@dataclass(frozen=True)
class CausalityReport:
    leakage_q: float      # max |h_q(t)|, t in [-window/gamma_Y, 0), relative to peak
    leakage_p: float
    poles: np.ndarray     # roots of F'
    stable: bool          # all poles strictly in the lower half plane
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.stable and max(self.leakage_q, self.leakage_p) < self.tolerance


def _check_grid(mode: ModeParams, grid: FrequencyGrid):
    if grid.half_span < 10.0 * mode.omega_y:
        raise GridError(f"grid half-span {grid.half_span:.3g} rad/s is below 10 omega_Y = "
                        f"{10 * mode.omega_y:.3g} rad/s")


def filter_rationals(mode: ModeParams) -> dict[str, Rational]:
    om = mode.omega
    den = Polynomial([mode.omega_y**2, -1j * mode.gamma_y * om, -(om**2)])
    out = {}
    for which, (b0, b1) in filter_coefficients(mode).items():
        out[which] = Rational(Polynomial([b0, -1j * b1 * om]), den, om)
    return out


TAIL_ORDER = 5


def causality_check(mode: ModeParams, grid: FrequencyGrid | None = None,
                    window: float = 50.0, tolerance: float = 1e-6) -> CausalityReport:
    """Reconstruct both impulse responses from the frequency response and measure t < 0 leakage.

    The slowly decaying large-|w| tail of each filter is replaced by its
    expansion in causal pieces c_n/(w + i beta)^n, whose transforms are
    added back exactly; the FFT only sees a remainder falling like
    w^-(TAIL_ORDER+1), so truncation ringing does not pose as acausality.
    """
    grid = FrequencyGrid.default_for(mode) if grid is None else grid
    _check_grid(mode, grid)
    w, t = grid.omega, grid.t
    beta = abs(mode.gamma_y)
    rel = {}
    for which, h in filter_rationals(mode).items():
        if mode.g == 0:
            rel[which] = 0.0
            continue
        coeffs = h.tail(beta, TAIL_ORDER, side=+1)
        rem = h(w) - tail_values(coeffs, beta, w, side=+1)
        ht = (_inverse_transform(rem, grid) + causal_tail_time(coeffs, beta, t)).real
        peak = np.max(np.abs(ht))
        neg = (t < 0) & (t >= -window / beta)
        rel[which] = float(np.max(np.abs(ht[neg])) / peak)
    poles = filter_poles(mode)
    return CausalityReport(leakage_q=rel["q"], leakage_p=rel["p"], poles=poles,
                           stable=bool(np.all(poles.imag < 0)), tolerance=tolerance)


def orthogonality_residual(mode: ModeParams, grid: FrequencyGrid | None = None) -> dict[str, float]:
    """Causal part of S_ZY - H_Z S_YY relative to the peak of the S_ZY transform.

    Optimality of the causal filter means the residual cross-correlation
    vanishes for every t > 0.  The residual's slow tail is expanded in
    anticausal pieces c_n/(w - i beta)^n, which contribute nothing at t > 0.
    """
    grid = FrequencyGrid.default_for(mode) if grid is None else grid
    _check_grid(mode, grid)
    w, t = grid.omega, grid.t
    beta = abs(mode.gamma_y)
    spec = spectral_rationals(mode)
    filt = filter_rationals(mode)
    s_yy = spec["s_yy"]
    fp = filt["q"].den
    out = {}
    for which in ("q", "p"):
        s_zy, h = spec["s_" + which + "y"], filt[which]
        resid = Rational(s_zy.num * fp - h.num * s_yy.num, s_yy.den * fp, mode.omega)
        coeffs = resid.tail(beta, TAIL_ORDER, side=-1)
        rem = resid(w) - tail_values(coeffs, beta, w, side=-1)
        r_t = _inverse_transform(rem, grid)
        ref_t = _inverse_transform(s_zy(w), grid)
        out[which] = float(np.max(np.abs(r_t[t > 0])) / np.max(np.abs(ref_t)))
    return out
