"""Finite-measurement-time statistics of the entanglement degree.

A record of length T is Fourier transformed on the grid omega_n = 2 pi n/T.
Its second moments are the stationary spectra smeared by the rectangular
window kernel.  With R_Z = (Z(omega_n) + Z(-omega_n))/2 four frequency
pairings appear: the opposite-sign ones give the Fejer kernel, the
equal-sign ones a kernel suppressed as 1/(T omega_n^2).  For an even
spectrum f the total smearing folds to

    int_0^inf f(w) (1 - cos wT) 4 w^2 / (pi T (w^2 - omega_n^2)^2) dw.

Two evaluation routes are provided: adaptive quadrature built on
:func:`window_kernel`, and a residue sum over the upper-half-plane poles of
the rational spectra (each pole contributes with the factor
1 - exp(i T (p - omega_n)), i.e. decays as exp(-T Im p)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import IntegrationWarning, quad

from ._rational import Rational
from .entanglement import correlator_rationals, e_fil
from .errors import NoSolutionError, QuadratureError
from .params import ExperimentConfig, ModeParams, derive_mode_params

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WindowedGridPoint:
    n: int
    omega_n: float
    t_window: float

    @classmethod
    def snap(cls, omega_target: float, t_window: float) -> "WindowedGridPoint":
        """Nearest grid frequency 2 pi n/T (n >= 1) to ``omega_target``."""
        if not t_window > 0:
            raise ValueError(f"window length must be positive, got {t_window!r}")
        n = max(1, int(round(omega_target * t_window / TWO_PI)))
        return cls(n=n, omega_n=TWO_PI * n / t_window, t_window=float(t_window))


def window_amplitude(x, t):
    """W_T(x) = 2 sin(xT/2)/(x sqrt T), with W_T(0) = sqrt T."""
    return math.sqrt(t) * np.sinc(np.asarray(x, dtype=float) * t / TWO_PI)


def window_kernel(omega_a, omega_b, omega, t):
    """Bilinear window kernel K = W_T(omega_a - w) W_T(omega_b + w)/(2 pi)."""
    w = np.asarray(omega, dtype=float)
    return window_amplitude(omega_a - w, t) * window_amplitude(omega_b + w, t) / TWO_PI


def folded_kernel(omega, grid: WindowedGridPoint, same_sign: bool = True):
    """Kernel acting on even spectra over w >= 0 (closed form of the summed pairings)."""
    w = np.asarray(omega, dtype=float)
    wn, t = grid.omega_n, grid.t_window
    total = (window_kernel(wn, -wn, w, t) + window_kernel(-wn, wn, w, t))
    if same_sign:
        total = total + 2.0 * window_kernel(wn, wn, w, t)
    return total


# ---------------------------------------------------------------- residues

def smear_residue(rat: Rational, grid: WindowedGridPoint, same_sign: bool = True) -> float:
    """int f(w) K(w) dw over the real line for an even real rational f, by residues."""
    wn, t = grid.omega_n, grid.t_window
    total = complex(rat(wn))
    poles = rat.poles()
    upper = poles[poles.imag > 0]
    if len(upper) != len(poles) // 2 or _has_repeated(upper):
        raise QuadratureError("residue route needs simple poles split evenly between half planes")
    for p in upper:
        rho = 1.0 / (math.pi * t * (p - wn) ** 2)
        if same_sign:
            rho += 1.0 / (math.pi * t * (p - wn) * (p + wn))
        total += 2j * math.pi * rat.residue(p) * rho * (1.0 - np.exp(1j * t * (p - wn)))
    return float(total.real)


def _has_repeated(roots) -> bool:
    r = np.asarray(roots)
    for i in range(len(r)):
        for j in range(i + 1, len(r)):
            if abs(r[i] - r[j]) <= 1e-9 * max(abs(r[i]), abs(r[j])):
                return True
    return False


# --------------------------------------------------------------- quadrature

NEAR_PERIODS = 8


def smear_quad(rat: Rational, grid: WindowedGridPoint, same_sign: bool = True,
               rtol: float = 1e-6, features=(), width: float | None = None) -> float:
    """Adaptive quadrature of the same integral, folded onto w >= 0.

    Near omega_n (NEAR_PERIODS kernel periods either side) the integrand is
    evaluated literally from :func:`window_kernel` on half-period pieces.
    Further out the kernel is (1 - cos wT) rho(w) with smooth rho; the smooth
    and cos-weighted parts are integrated separately (the latter with QAWO),
    split at the spectral peaks ``features`` (half-width scale ``width``).  Beyond a cutoff B the tail is
    bounded analytically using |f| <= C/w^2 and rho <= 64/(9 pi T w^2).
    """
    wn, t = grid.omega_n, grid.t_window
    period = TWO_PI / t
    feats = sorted({abs(float(x)) for x in features if abs(float(x)) > 0} | {wn})
    width = period if width is None else width

    def f(w):
        return rat(w).real

    def kern(w):
        return folded_kernel(w, grid, same_sign)

    def rho(w):
        d = (w * w - wn * wn) ** 2
        if same_sign:
            return 4.0 * w * w / (math.pi * t * d)
        return 2.0 * (w * w + wn * wn) / (math.pi * t * d)

    pieces = []  # (value, error, (a, b))

    def run(fun, a, b, **kw):
        if b <= a:
            return
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(fun, a, b, epsabs=0.0, epsrel=max(rtol * 1e-3, 1e-13), limit=400, **kw)[:2]
        pieces.append((val, err, (a, b)))

    near_lo, near_hi = max(0.0, wn - NEAR_PERIODS * period), wn + NEAR_PERIODS * period
    edges = np.arange(near_lo, near_hi + 0.25 * period, 0.5 * period)
    edges = np.unique(np.clip(np.concatenate([edges, [near_lo, near_hi]]), near_lo, near_hi))
    for a, b in zip(edges[:-1], edges[1:]):
        pts = [x for x in feats if a < x < b]
        run(lambda w: f(w) * kern(w), a, b, points=pts or None)

    # far region: split into intervals free of omega_n, cut at spectral peaks
    scale = max(feats + [wn])
    cutoff = 4.0 * scale
    cf = 2.0 * max(abs(f(cutoff)) * cutoff**2, abs(f(8 * cutoff)) * (8 * cutoff) ** 2)
    est = abs(f(wn))
    while 2.0 * cf * 64.0 / (27.0 * math.pi * t * cutoff**3) > 1e-12 * est:
        cutoff *= 2.0
    tail_bound = 2.0 * cf * 64.0 / (27.0 * math.pi * t * cutoff**3)
    far = []
    if near_lo > 0:
        far.append((0.0, near_lo))
    far.append((near_hi, cutoff))
    for a0, b0 in far:
        inner = [x for x in feats if a0 < x < b0]
        knots = [a0]
        for x in inner:
            knots += [max(a0, x - 50 * width), x, min(b0, x + 50 * width)]
        knots = sorted(set(knots + [b0]))
        for a, b in zip(knots[:-1], knots[1:]):
            if b - a <= 0:
                continue
            run(lambda w: f(w) * rho(w), a, b)
            run(lambda w: -f(w) * rho(w), a, b, weight="cos", wvar=t)
    total = sum(p[0] for p in pieces)
    err = sum(p[1] for p in pieces) + tail_bound
    if err > rtol * abs(total):
        worst = max(pieces, key=lambda p: p[1])
        raise QuadratureError(f"quadrature error {err:.3g} exceeds rtol {rtol:g} of {total:.6g}",
                              worst_interval=worst[2], error=err)
    return float(total)


def smear(rat: Rational, grid: WindowedGridPoint, method: str = "quad", same_sign: bool = True,
          rtol: float = 1e-6, features=(), width: float | None = None) -> float:
    if method == "residue":
        return smear_residue(rat, grid, same_sign)
    if method == "quad":
        return smear_quad(rat, grid, same_sign, rtol, features, width)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class WindowedMoments:
    grid: WindowedGridPoint
    rq2_plus: float
    rp2_minus: float
    comm_sq: float
    freq_ratio: float
    e_d: float


def windowed_moments(cfg: ExperimentConfig, grid: WindowedGridPoint, method: str = "quad",
                     same_sign: bool = True, rtol: float = 1e-6) -> WindowedMoments:
    mp, mm = derive_mode_params(cfg, +1), derive_mode_params(cfg, -1)
    rp_, rm_ = correlator_rationals(mp), correlator_rationals(mm)
    feats = [mp.omega, mp.omega_y, mm.omega, mm.omega_y]
    kw = dict(method=method, same_sign=same_sign, rtol=rtol, features=feats,
              width=max(mp.gamma_y, mm.gamma_y))
    rq2 = smear(rp_["rq2"], grid, **kw)
    rp2 = smear(rm_["rp2"], grid, **kw)
    comm = smear(rp_["comm"], grid, **kw) + smear(rm_["comm"], grid, **kw)
    comm_sq = comm**2 / 256.0
    ratio = mm.omega / mp.omega
    return WindowedMoments(grid, rq2, rp2, comm_sq, ratio, rq2 * rp2 * ratio / comm_sq)


def e_d(cfg: ExperimentConfig, grid: WindowedGridPoint, method: str = "quad",
        same_sign: bool = True, rtol: float = 1e-6) -> float:
    """Entanglement degree for a record of length grid.t_window at grid.omega_n."""
    return windowed_moments(cfg, grid, method, same_sign, rtol).e_d


# ------------------------------------------------------------ error budget

@dataclass(frozen=True)
class FiniteTimeReport:
    grid: WindowedGridPoint
    e_d: float
    e_fil_ref: float
    delta_sys: float
    delta_stat_1: float
    n_runs: int
    delta_stat_n: float
    snr: float


def stat_error(e_d_value: float, n_runs: int = 1) -> float:
    """Gaussian-statistics spread 2 sqrt 2 E_d/sqrt(N0) of the entanglement estimator."""
    return 2.0 * math.sqrt(2.0) * e_d_value / math.sqrt(n_runs)


def snr_value(e_d_value: float, n_runs: int) -> float:
    return (1.0 - e_d_value) / stat_error(e_d_value, n_runs)


def build_report(grid: WindowedGridPoint, e_d_value: float, e_fil_ref: float, n_runs: int) -> FiniteTimeReport:
    if not (isinstance(n_runs, (int, np.integer)) and n_runs >= 1):
        raise ValueError(f"n_runs must be a positive integer, got {n_runs!r}")
    d1 = 2.0 * math.sqrt(2.0) * e_d_value
    dn = d1 / math.sqrt(n_runs)
    return FiniteTimeReport(grid=grid, e_d=e_d_value, e_fil_ref=e_fil_ref,
                            delta_sys=e_d_value - e_fil_ref, delta_stat_1=d1, n_runs=int(n_runs),
                            delta_stat_n=dn, snr=(1.0 - e_d_value) / dn)


def error_budget(cfg: ExperimentConfig, grid: WindowedGridPoint, n_runs: int = 1,
                 method: str = "quad", e_fil_ref: float | None = None) -> FiniteTimeReport:
    """Systematic and statistical errors at one grid point.

    The reference is the stationary E_Fil at Omega_+ unless given.
    """
    ref = e_fil(cfg).e_fil if e_fil_ref is None else e_fil_ref
    return build_report(grid, e_d(cfg, grid, method), ref, n_runs)


# -------------------------------------------------------------------- SNR

@dataclass(frozen=True)
class SNRTable:
    t_total: np.ndarray      # shape (nt,)
    n0: np.ndarray           # shape (nn,)
    snr: np.ndarray          # shape (nt, nn)
    e_d: np.ndarray          # shape (nt, nn)
    level: float

    @property
    def above(self) -> np.ndarray:
        return self.snr >= self.level

    def level_crossing(self) -> np.ndarray:
        """Smallest grid T_total with SNR >= level, per N0 (nan where never reached)."""
        out = np.full(len(self.n0), np.nan)
        for j in range(len(self.n0)):
            hit = np.nonzero(self.above[:, j])[0]
            if hit.size:
                out[j] = self.t_total[hit[0]]
        return out


def snr_contour(cfg: ExperimentConfig, t_total_grid, n0_grid, method: str = "residue",
                level: float = 1.0, omega_target: float | None = None, mapper=map) -> SNRTable:
    tt = np.asarray(t_total_grid, dtype=float)
    nn = np.asarray(n0_grid, dtype=int)
    if np.any(tt <= 0) or np.any(nn < 1):
        raise ValueError("T_total must be positive and N0 >= 1")
    target = cfg.omega_m if omega_target is None else omega_target
    cells = [(cfg, WindowedGridPoint.snap(target, t / n), method) for t in tt for n in nn]
    eds = np.array(list(mapper(_ed_cell, cells))).reshape(len(tt), len(nn))
    snr = (1.0 - eds) / (2.0 * math.sqrt(2.0) * eds / np.sqrt(nn)[None, :])
    return SNRTable(t_total=tt, n0=nn, snr=snr, e_d=eds, level=level)


def _ed_cell(args):
    cfg, grid, method = args
    return e_d(cfg, grid, method)


def max_snr(cfg: ExperimentConfig, t_total: float, n0_max: int = 32, method: str = "residue",
            omega_target: float | None = None) -> tuple[float, int]:
    target = cfg.omega_m if omega_target is None else omega_target
    best, best_n = -math.inf, 1
    for n0 in range(1, n0_max + 1):
        ed = e_d(cfg, WindowedGridPoint.snap(target, t_total / n0), method)
        s = snr_value(ed, n0)
        if s > best:
            best, best_n = s, n0
    return best, best_n


def time_to_snr(cfg: ExperimentConfig, target_snr: float = 1.0, n0_max: int = 32,
                log10_range: tuple[float, float] = (3.0, 9.0), step: float = 0.02,
                tol_log10: float = 1e-3, method: str = "residue") -> tuple[float, int]:
    """Smallest total time whose best split into N0 <= n0_max runs reaches ``target_snr``.

    A log-spaced scan locates the first crossing; bisection in log10 T_total
    then refines it to ``tol_log10``.
    """
    if not target_snr > 0:
        raise ValueError("target SNR must be positive")
    if not e_fil(cfg).entangled:
        raise NoSolutionError("stationary E_Fil >= 1: the state is not certified entangled")
    grid = np.arange(log10_range[0], log10_range[1] + 0.5 * step, step)
    prev = None
    for lg in grid:
        s, _ = max_snr(cfg, 10.0**lg, n0_max, method)
        if s >= target_snr:
            if prev is None:
                return 10.0**lg, max_snr(cfg, 10.0**lg, n0_max, method)[1]
            lo, hi = prev, lg
            while hi - lo > tol_log10:
                mid = 0.5 * (lo + hi)
                if max_snr(cfg, 10.0**mid, n0_max, method)[0] >= target_snr:
                    hi = mid
                else:
                    lo = mid
            return 10.0**hi, max_snr(cfg, 10.0**hi, n0_max, method)[1]
        prev = lg
    raise NoSolutionError(f"SNR {target_snr} not reached for T_total <= 1e{log10_range[1]} s")


# ------------------------------------------------------------------ poles

@dataclass(frozen=True)
class PoleFamily:
    name: str
    roots: np.ndarray
    residual: float   # max |P(root)| relative to the polynomial's scale

    @property
    def min_abs_imag(self) -> float:
        return float(np.min(np.abs(self.roots.imag)))


def integrand_poles(mode: ModeParams, filtered: bool = True) -> list[PoleFamily]:
    """Roots of F, F*, |F|^2 (and F', F'*, |F'|^2 when filtered) in rad/s.

    F*(w) is the conjugate function conj(F(conj w)) = Omega^2 + i gamma_m w - w^2.
    """
    om = mode.omega
    fams = {
        "F": Polynomial([1.0, -1j * mode.gamma_m / om, -1.0]),
        "F*": Polynomial([1.0, 1j * mode.gamma_m / om, -1.0]),
    }
    fams["|F|^2"] = fams["F"] * fams["F*"]
    if filtered:
        a = (mode.omega_y / om) ** 2
        fams["F'"] = Polynomial([a, -1j * mode.gamma_y / om, -1.0])
        fams["F'*"] = Polynomial([a, 1j * mode.gamma_y / om, -1.0])
        fams["|F'|^2"] = fams["F'"] * fams["F'*"]
    out = []
    for name, poly in fams.items():
        roots = _polish(poly, poly.roots())
        resid = float(np.max(np.abs(poly(roots))) / np.max(np.abs(poly.coef)))
        out.append(PoleFamily(name, roots * om, resid))
    return out


def _polish(poly: Polynomial, roots: np.ndarray, steps: int = 3) -> np.ndarray:
    d = poly.deriv()
    r = np.asarray(roots, dtype=complex)
    for _ in range(steps):
        r = r - poly(r) / d(r)
    return r
