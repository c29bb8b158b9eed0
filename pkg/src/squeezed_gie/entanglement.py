"""Conditional correlators, commutator expectations and the entanglement degree.

Every frequency-dependent piece is a ratio of polynomials in omega with the
common denominator |F'(omega)|^2; they are built once per mode as
:class:`Rational` objects so that the finite-time code can integrate them
by residues as well as by quadrature.

Filter-residual second moments are written with the filter numerator
coefficients (b0, b1) of :func:`wiener.filter_coefficients`, which keeps the
g -> 0 limit finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from ._rational import Rational
from .errors import NoSolutionError, UnsupportedError
from .params import ExperimentConfig, ModeParams, SqueezeFactors, derive_mode_params
from .wiener import filter_coefficients, wiener_filters


def _fp_abs2(mode: ModeParams) -> Polynomial:
    """|F'(w)|^2 = F'(w) F'(-w) in x = w/Omega."""
    om = mode.omega
    fp = Polynomial([mode.omega_y**2, -1j * mode.gamma_y * om, -(om**2)])
    fm = Polynomial([mode.omega_y**2, 1j * mode.gamma_y * om, -(om**2)])
    return fp * fm


def correlator_rationals(mode: ModeParams, sq: SqueezeFactors | None = None) -> dict[str, Rational]:
    """Stationary <R_q~^2>(w), <R_p~^2>(w) and the commutator kernel of one mode.

    ``comm`` is m(w)/i with m(w) = c(w) + c(-w) the (purely imaginary)
    symmetrised single-mode commutator expectation.
    """
    sq = mode.squeeze if sq is None else sq
    om, gm, kappa, g = mode.omega, mode.gamma_m, mode.kappa, mode.g
    dg, dw2 = mode.dgamma, mode.domega2
    d = dw2 - dg * gm
    nn = mode.optical_floor
    x2 = Polynomial([0.0, 0.0, om**2])  # w^2
    back = 2.0 * gm * (2.0 * mode.nth + 1.0) / nn + 16.0 * g**2 / kappa * sq.s_plus
    c = filter_coefficients(mode)
    (bq0, bq1), (bp0, bp1) = c["q"], c["p"]
    num_q = nn / 2.0 * (om**2 * back + (bq0**2 + bq1**2 * x2) * sq.s_minus
                        - 2.0 * om * dw2 * sq.s_cross)
    num_p = nn / 2.0 * ((x2 + dg**2) * back + (bp0**2 + bp1**2 * x2) * sq.s_minus
                        - 2.0 * (x2 * d - dg**2 * om**2) / om * sq.s_cross)
    w = Polynomial([0.0, om])
    iw = 1j * w
    cnum = (4.0 * gm * w * (dg + iw) - 2j * (-dg * om**2 + iw * d)
            + 2j * (dg + iw) * (dw2 - iw * dg))
    flip = Polynomial(cnum.coef * (-1.0) ** np.arange(len(cnum.coef)))
    mnum = (cnum + flip) * (-1j)
    den = _fp_abs2(mode)
    return {"rq2": Rational(num_q, den, om), "rp2": Rational(num_p, den, om),
            "comm": Rational(mnum, den, om), "comm_single": Rational(cnum, den, om)}


def mode_commutator(mode: ModeParams, omega):
    """Single-mode commutator expectation c(w) (complex)."""
    return correlator_rationals(mode)["comm_single"](omega)


def conditional_correlators(mode_plus: ModeParams, mode_minus: ModeParams, sq=None, omega=None):
    """(<R_q~+^2>, <R_p~-^2>) at omega (defaults to Omega_+)."""
    omega = mode_plus.omega if omega is None else omega
    rq2 = correlator_rationals(mode_plus, sq)["rq2"](omega).real
    rp2 = correlator_rationals(mode_minus, sq)["rp2"](omega).real
    return rq2, rp2


def commutator_expectation(mode_plus: ModeParams, mode_minus: ModeParams, omega=None):
    """|<[R_q~A, R_p~A]>|^2 assembled from both modes at +-omega."""
    omega = mode_plus.omega if omega is None else omega
    m = (correlator_rationals(mode_plus)["comm"](omega)
         + correlator_rationals(mode_minus)["comm"](omega)).real
    return m**2 / 256.0


@dataclass(frozen=True)
class EntanglementReport:
    omega: float
    rq2_plus: float
    rp2_minus: float
    comm_sq: float
    freq_ratio: float   # Omega_-/Omega_+
    e_fil: float
    entangled: bool

    @staticmethod
    def assemble(rq2_plus, rp2_minus, comm_sq, freq_ratio):
        return rq2_plus * rp2_minus * freq_ratio / comm_sq


def e_fil(cfg: ExperimentConfig, omega=None) -> EntanglementReport:
    mp, mm = derive_mode_params(cfg, +1), derive_mode_params(cfg, -1)
    omega = mp.omega if omega is None else float(omega)
    rq2, rp2 = conditional_correlators(mp, mm, omega=omega)
    comm = commutator_expectation(mp, mm, omega)
    ratio = mm.omega / mp.omega
    e = EntanglementReport.assemble(rq2, rp2, comm, ratio)
    return EntanglementReport(omega=omega, rq2_plus=float(rq2), rp2_minus=float(rp2),
                              comm_sq=float(comm), freq_ratio=ratio, e_fil=float(e),
                              entangled=bool(e < 1.0))


def calibrate_epsilon(cfg: ExperimentConfig, target: float = 0.30,
                      bracket: tuple[float, float] = (1e-6, 0.95), xtol: float = 1e-12) -> float:
    """Gravitational coupling at which E_Fil(Omega_+) equals ``target``."""
    def f(eps):
        return e_fil(cfg.replace(epsilon=eps)).e_fil - target
    lo, hi = bracket
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise NoSolutionError(f"E_Fil - {target} does not change sign on epsilon in {bracket}")
    return brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class ConditionResult:
    lhs: float
    rhs: float
    satisfied: bool
    terms: tuple[float, ...] = ()


def condition_no_filter(cfg: ExperimentConfig) -> ConditionResult:
    """Q_+ eps > 2(2 n_th + 1) + 4 C_+ s_plus (unfiltered entanglement condition)."""
    mp = derive_mode_params(cfg, +1)
    thermal = 2.0 * (2.0 * mp.nth + 1.0)
    radiation = 4.0 * mp.coop * cfg.squeeze.s_plus
    lhs, rhs = mp.q_factor * cfg.eps, thermal + radiation
    return ConditionResult(lhs, rhs, bool(lhs > rhs), (thermal, radiation))


def _require_phase_squeezing(cfg: ExperimentConfig):
    if abs(cfg.squeeze_phi_rad - math.pi / 2) > 1e-12:
        raise UnsupportedError("the filtered entanglement condition is only derived for phi = pi/2")


def condition_with_filter(cfg: ExperimentConfig) -> ConditionResult:
    """Filtered entanglement condition (valid at phi = pi/2 only).

    terms = (thermal, radiation pressure, filter gain, filter cancellation).
    """
    _require_phase_squeezing(cfg)
    mp = derive_mode_params(cfg, +1)
    r, eps = cfg.squeeze_r, cfg.eps
    rel = mp.dgamma / mp.gamma_m
    thermal = 2.0 * (2.0 * mp.nth + 1.0)
    radiation = 4.0 * mp.coop * math.exp(-2.0 * r)
    gain = rel**2 * math.exp(2.0 * r) / (4.0 * mp.coop) if mp.coop > 0 else 0.0
    cancel = -(1.0 + mp.domega2 * eps / mp.gamma_y**2) * rel
    lhs, rhs = mp.q_factor * eps, thermal + radiation + gain + cancel
    return ConditionResult(lhs, rhs, bool(lhs > rhs), (thermal, radiation, gain, cancel))


def filtered_condition_validity(cfg: ExperimentConfig) -> tuple[float, float]:
    """The two approximations behind the filtered condition, as ratios that should be small.

    Returns ((omega_Y^2 - Omega^2)^2 / (Omega^2 (gamma_Y - gamma_m)^2),
             |H_q+(Omega)|^2 / |H_p-(Omega)|^2 - 1).
    """
    mp, mm = derive_mode_params(cfg, +1), derive_mode_params(cfg, -1)
    a = mp.domega2**2 / (mp.omega**2 * mp.dgamma**2)
    hq = abs(wiener_filters(mp, mp.omega).h_q) ** 2
    hp = abs(wiener_filters(mm, mp.omega).h_p) ** 2
    return float(a), float(hq / hp - 1.0)
