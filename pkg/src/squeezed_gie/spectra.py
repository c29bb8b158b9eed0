"""Susceptibilities and symmetrised spectral densities of the steady state.

Densities are per unit 2 pi delta(omega + omega'), i.e. the delta
normalisation is stripped.  All functions broadcast over ``omega``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ModeParams, SqueezeFactors


@dataclass(frozen=True)
class SpectralDensities:
    omega: np.ndarray | float
    s_yy: np.ndarray | float
    s_qy: np.ndarray | complex
    s_py: np.ndarray | complex


def susceptibility(mode: ModeParams, omega):
    """Return (F, F') = (Omega^2 - i gamma_m w - w^2, omega_Y^2 - i gamma_Y w - w^2)."""
    w = np.asarray(omega, dtype=float)
    f = mode.omega**2 - 1j * mode.gamma_m * w - w**2
    fp = mode.omega_y**2 - 1j * mode.gamma_y * w - w**2
    return f, fp


def spectral_densities(mode: ModeParams, omega, sq: SqueezeFactors | None = None) -> SpectralDensities:
    sq = mode.squeeze if sq is None else sq
    w = np.asarray(omega, dtype=float)
    f, _ = susceptibility(mode, w)
    f2 = np.abs(f) ** 2
    g, om, kappa, gm = mode.g, mode.omega, mode.kappa, mode.gamma_m
    nn = mode.optical_floor
    nt = 2.0 * mode.nth + 1.0
    s_yy = (32.0 * gm * g**2 * om**2 / (kappa * f2) * nt
            + 256.0 * g**4 * om**2 / (kappa**2 * f2) * nn * sq.s_plus
            + nn * sq.s_minus
            + 16.0 * g**2 * om / kappa * (1.0 / f + 1.0 / np.conj(f)).real * nn * sq.s_cross)
    s_qy = (8.0 * g * om**2 * gm / (np.sqrt(kappa) * f2) * nt
            + 64.0 * g**3 * om**2 / (kappa * np.sqrt(kappa) * f2) * nn * sq.s_plus
            + 4.0 * g * om / (np.sqrt(kappa) * f) * nn * sq.s_cross)
    s_py = -1j * w / om * s_qy
    return SpectralDensities(omega=w, s_yy=s_yy, s_qy=s_qy, s_py=s_py)


def s_qq(mode: ModeParams, omega, sq: SqueezeFactors | None = None):
    """Symmetrised position spectrum of the unconditioned mode."""
    sq = mode.squeeze if sq is None else sq
    f, _ = susceptibility(mode, omega)
    drive = 2.0 * mode.gamma_m * (2.0 * mode.nth + 1.0) + mode.alpha**2 * mode.optical_floor * sq.s_plus
    return mode.omega**2 * drive / np.abs(f) ** 2


def position_variance(mode: ModeParams, sq: SqueezeFactors | None = None) -> float:
    """Stationary <q^2> = int S_qq dw/2pi, in closed form for a Lorentzian drive."""
    sq = mode.squeeze if sq is None else sq
    drive = 2.0 * mode.gamma_m * (2.0 * mode.nth + 1.0) + mode.alpha**2 * mode.optical_floor * sq.s_plus
    # int dw/2pi 1/|F|^2 = 1/(2 gamma_m Omega^2)
    return drive / (2.0 * mode.gamma_m)


def spectral_rationals(mode: ModeParams, sq: SqueezeFactors | None = None) -> dict:
    """S_YY, S_qY, S_pY as polynomial ratios in x = omega/Omega (used by the filter checks)."""
    from numpy.polynomial import Polynomial

    from ._rational import Rational

    sq = mode.squeeze if sq is None else sq
    om, g, kappa, gm = mode.omega, mode.g, mode.kappa, mode.gamma_m
    nn, nt = mode.optical_floor, 2.0 * mode.nth + 1.0
    f = Polynomial([om**2, -1j * gm * om, -(om**2)])
    fc = Polynomial([om**2, 1j * gm * om, -(om**2)])
    ff = f * fc
    n_yy = (32.0 * gm * g**2 * om**2 / kappa * nt + 256.0 * g**4 * om**2 / kappa**2 * nn * sq.s_plus
            + nn * sq.s_minus * ff + 16.0 * g**2 * om / kappa * nn * sq.s_cross * (f + fc))
    n_qy = (8.0 * g * om**2 * gm / math.sqrt(kappa) * nt
            + 64.0 * g**3 * om**2 / kappa**1.5 * nn * sq.s_plus
            + 4.0 * g * om / math.sqrt(kappa) * nn * sq.s_cross * fc)
    n_py = Polynomial([0.0, -1j]) * n_qy  # -i w/Omega = -i x
    return {"s_yy": Rational(n_yy, ff, om), "s_qy": Rational(n_qy, ff, om),
            "s_py": Rational(n_py, ff, om), "f": f, "fc": fc}
