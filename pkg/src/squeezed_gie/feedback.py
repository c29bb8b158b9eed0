"""Cold-damping feedback: transfer function, position spectrum, admissible gain.

The feedback force is -g(w) Y(w) with the one-pole high-pass
g(w) = -i w g_cd/(1 - i w/omega_fb); omega_fb = inf gives the ideal
derivative -i w g_cd.  Damping then reads gamma_m = Gamma + alpha Omega g_cd.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UnsupportedError
from .params import HBAR, K_B, ExperimentConfig, derive_mode_params


@dataclass(frozen=True)
class FeedbackParams:
    g_cd: float = 0.0
    omega_fb: float = math.inf
    margin: float = 0.1

    def __post_init__(self):
        if not (self.g_cd >= 0 and math.isfinite(self.g_cd)):
            raise ConfigError(f"g_cd must be finite and >= 0, got {self.g_cd!r}")
        if not self.omega_fb > 0:
            raise ConfigError(f"omega_fb must be positive, got {self.omega_fb!r}")
        if not (0 < self.margin <= 1):
            raise ConfigError(f"margin must lie in (0, 1], got {self.margin!r}")


def fb_transfer(fb: FeedbackParams, omega):
    w = np.asarray(omega, dtype=float)
    if math.isinf(fb.omega_fb):
        return -1j * w * fb.g_cd
    return -1j * w * fb.g_cd / (1.0 - 1j * w / fb.omega_fb)


def thermal_drive(cfg: ExperimentConfig, omega_mode: float) -> float:
    """2 Gamma (2 k_B T/(hbar Omega) + 1): bath force noise at the intrinsic dissipation."""
    return 2.0 * cfg.big_gamma * (2.0 * K_B * cfg.env_temperature_k / (HBAR * omega_mode) + 1.0)


def _require_phase_squeezing(cfg: ExperimentConfig):
    if abs(cfg.squeeze_phi_rad - math.pi / 2) > 1e-12:
        raise UnsupportedError("the feedback spectrum is only derived for phi = pi/2")


def fb_sqq(cfg: ExperimentConfig, fb: FeedbackParams, omega, sign=+1):
    """Position spectrum of a feedback-cooled mode (phase-squeezed input).

    For finite omega_fb the loop response enters through g(w); the ideal
    derivative limit reproduces a Lorentzian with gamma_m = Gamma + alpha Omega g_cd.
    """
    _require_phase_squeezing(cfg)
    mode = derive_mode_params(cfg, sign)
    w = np.asarray(omega, dtype=float)
    om, alpha = mode.omega, mode.alpha
    nn = 2.0 * cfg.photon_nth + 1.0
    r = cfg.squeeze_r
    g = fb_transfer(fb, w)
    chi = om**2 + alpha * om * g - 1j * cfg.big_gamma * w - w**2
    drive = (thermal_drive(cfg, om) + alpha**2 * nn * math.exp(-2.0 * r)
             + np.abs(g) ** 2 * nn * math.exp(2.0 * r))
    return om**2 * drive / np.abs(chi) ** 2


@dataclass(frozen=True)
class FeedbackBounds:
    g_cd_max: float
    gamma_m_eff: float
    per_mode: dict       # sign -> (g_cd_max, gamma_m_eff) using that mode's Omega and alpha


def _gain_bound(cfg: ExperimentConfig, omega_mode: float, margin: float) -> float:
    return margin * math.sqrt(4.0 * K_B * cfg.env_temperature_k * cfg.big_gamma
                              / (HBAR * omega_mode**3 * math.exp(2.0 * cfg.squeeze_r)))


def fb_bounds(cfg: ExperimentConfig, margin: float = 0.1) -> FeedbackBounds:
    """Largest gain whose noise stays ``margin`` below thermal noise, and the damping it buys.

    The feedback noise amplitude g_cd Omega e^r is held to ``margin`` times the
    thermal amplitude sqrt(4 Gamma k_B T/(hbar Omega)).
    """
    per = {}
    for s in (+1, -1):
        mode = derive_mode_params(cfg, s)
        gmax = _gain_bound(cfg, mode.omega, margin)
        per[s] = (gmax, cfg.big_gamma + mode.alpha * mode.omega * gmax)
    return FeedbackBounds(g_cd_max=per[1][0], gamma_m_eff=per[1][1], per_mode=per)


@dataclass(frozen=True)
class NoiseCondition:
    lhs: float
    rhs: float
    satisfied: bool


def fb_noise_condition(cfg: ExperimentConfig, g_cd: float, sign=+1) -> NoiseCondition:
    """Thermal + radiation-pressure noise exceeds the injected feedback noise at resonance."""
    mode = derive_mode_params(cfg, sign)
    nn = 2.0 * cfg.photon_nth + 1.0
    lhs = thermal_drive(cfg, mode.omega) + mode.alpha**2 * nn * math.exp(-2.0 * cfg.squeeze_r)
    rhs = g_cd**2 * mode.omega**2 * nn * math.exp(2.0 * cfg.squeeze_r)
    return NoiseCondition(lhs, rhs, bool(lhs > rhs))
