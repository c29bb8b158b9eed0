"""Physical parameters and derived per-mode quantities.

Config files carry ordinary frequencies in Hz; everything computed here is in
angular units (rad/s).  The two normal modes are the common (+) mode at the
bare mechanical frequency and the differential (-) mode whose frequency is
pulled down by gravity, Omega_- = Omega sqrt(1 - eps).
"""
from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .errors import ConfigError, DomainError

# CODATA 2018
HBAR = 1.054571817e-34
K_B = 1.380649e-23
G_NEWTON = 6.67430e-11

TWO_PI = 2.0 * math.pi


class SqueezeFactors(NamedTuple):
    s_plus: float   # amplitude-quadrature noise factor
    s_minus: float  # phase-quadrature noise factor
    s_cross: float  # amplitude/phase cross correlation


def squeeze_factors(r: float, phi: float) -> SqueezeFactors:
    """Quadrature noise factors of a pure squeezed vacuum with strength r, angle phi."""
    if not (r >= 0 and math.isfinite(r)):
        raise DomainError(f"squeeze strength r must be finite and >= 0, got {r!r}")
    if not (0.0 <= phi <= math.pi):
        raise DomainError(f"squeeze angle phi must lie in [0, pi], got {phi!r}")
    # cosh 2r +- cos 2phi sinh 2r written as sums of positive terms (no cancellation at large r)
    up, down = math.exp(2 * r), math.exp(-2 * r)
    c, s = math.cos(phi) ** 2, math.sin(phi) ** 2
    return SqueezeFactors(up * c + down * s, up * s + down * c, math.sin(2 * phi) * math.sinh(2 * r))


def separation_to_epsilon(separation_m: float, mass_kg: float, omega: float) -> float:
    return 4.0 * G_NEWTON * mass_kg / (separation_m**3 * omega**2)


def epsilon_to_separation(epsilon: float, mass_kg: float, omega: float) -> float:
    return (4.0 * G_NEWTON * mass_kg / (epsilon * omega**2)) ** (1.0 / 3.0)


# Defaults are the reference parameter table (frequencies as nu = omega/2pi).
@dataclass(frozen=True)
class ExperimentConfig:
    mech_freq_hz: float = 1e-3
    cavity_freq_hz: float = 2.818e14
    laser_freq_hz: float = 2.818e14
    mirror_mass_kg: float = 1e-3
    cavity_length_m: float = 0.1
    env_temperature_k: float = 1.0
    fb_damping_hz: float = 6.6e-6
    mech_dissipation_hz: float = 1e-18
    cavity_decay_hz: float = 1e8
    laser_power_w: float = 1e-10
    # gravitational coupling: exactly one of these must be given
    epsilon: float | None = None
    separation_m: float | None = None
    squeeze_r: float = 0.0
    squeeze_phi_rad: float = math.pi / 2
    photon_nth: float = 0.0

    def __post_init__(self):
        positive = ("mech_freq_hz", "cavity_freq_hz", "laser_freq_hz", "mirror_mass_kg",
                    "cavity_length_m", "env_temperature_k", "fb_damping_hz",
                    "mech_dissipation_hz", "cavity_decay_hz")
        for name in positive:
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not (v > 0) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite positive number, got {v!r}")
        for name in ("laser_power_w", "squeeze_r", "photon_nth"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not (v >= 0) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite number >= 0, got {v!r}")
        if not (0.0 <= self.squeeze_phi_rad <= math.pi):
            raise ConfigError(f"squeeze_phi_rad must lie in [0, pi], got {self.squeeze_phi_rad!r}")
        if (self.epsilon is None) == (self.separation_m is None):
            raise ConfigError("give exactly one of epsilon or separation_m for the gravitational coupling")
        if self.separation_m is not None and not (self.separation_m > 0):
            raise ConfigError(f"separation_m must be positive, got {self.separation_m!r}")
        if abs(self.laser_freq_hz - self.cavity_freq_hz) / self.cavity_freq_hz >= 1e-6:
            raise ConfigError("the model assumes a resonant drive: |nu_L - nu_c|/nu_c must be < 1e-6")
        eps = self.eps
        if not (eps >= 0) or not math.isfinite(eps):
            raise DomainError(f"gravitational coupling epsilon must be >= 0, got {eps!r}")
        if eps >= 1:
            raise DomainError(f"epsilon = {eps!r} >= 1 makes the differential mode unstable")
        if self.mech_freq_hz / self.cavity_decay_hz > 1e-3:
            warnings.warn("Omega/kappa > 1e-3: the adiabatic cavity elimination is questionable",
                          stacklevel=3)

    # angular quantities -------------------------------------------------
    @property
    def omega_m(self) -> float:
        return TWO_PI * self.mech_freq_hz

    @property
    def omega_c(self) -> float:
        return TWO_PI * self.cavity_freq_hz

    @property
    def omega_l(self) -> float:
        return TWO_PI * self.laser_freq_hz

    @property
    def gamma_m(self) -> float:
        return TWO_PI * self.fb_damping_hz

    @property
    def big_gamma(self) -> float:
        return TWO_PI * self.mech_dissipation_hz

    @property
    def kappa(self) -> float:
        return TWO_PI * self.cavity_decay_hz

    @property
    def eps(self) -> float:
        if self.epsilon is not None:
            return float(self.epsilon)
        return separation_to_epsilon(self.separation_m, self.mirror_mass_kg, self.omega_m)

    @property
    def squeeze(self) -> SqueezeFactors:
        return squeeze_factors(self.squeeze_r, self.squeeze_phi_rad)

    def replace(self, **changes) -> "ExperimentConfig":
        # switching coupling representation clears the other one
        if "epsilon" in changes and changes["epsilon"] is not None:
            changes.setdefault("separation_m", None)
        if "separation_m" in changes and changes["separation_m"] is not None:
            changes.setdefault("epsilon", None)
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        eps, sep = d.pop("epsilon"), d.pop("separation_m")
        d["grav_coupling"] = {"epsilon": eps} if eps is not None else {"separation_m": sep}
        return d


@dataclass(frozen=True)
class ModeParams:
    sign: int           # +1 common mode, -1 differential mode
    omega: float        # mode frequency [rad/s]
    g: float            # optomechanical coupling [rad/s]
    nth: float          # thermal phonon number
    q_factor: float
    coop: float         # cooperativity 4 g^2/(gamma_m kappa)
    lam: float          # measurement rate
    big_lambda: float   # squeezing-induced cross-correlation shift
    gamma_y: float      # filter bandwidth
    omega_y: float      # filter frequency
    gamma_m: float
    kappa: float
    photon_nth: float
    squeeze: SqueezeFactors = field(default=SqueezeFactors(1.0, 1.0, 0.0))

    @property
    def alpha(self) -> float:
        """Position-to-output gain 4 g / sqrt(kappa)."""
        return 4.0 * self.g / math.sqrt(self.kappa)

    @property
    def dgamma(self) -> float:
        return self.gamma_y - self.gamma_m

    @property
    def domega2(self) -> float:
        return self.omega_y**2 - self.omega**2

    @property
    def optical_floor(self) -> float:
        return 2.0 * self.photon_nth + 1.0


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"mode sign must be + or -, got {sign!r}")


def derive_mode_params(cfg: ExperimentConfig, sign) -> ModeParams:
    s = _sign(sign)
    eps = cfg.eps
    if eps >= 1:
        raise DomainError(f"epsilon = {eps!r} >= 1")
    om = cfg.omega_m if s > 0 else cfg.omega_m * math.sqrt(1.0 - eps)
    gm, kappa = cfg.gamma_m, cfg.kappa
    drive = math.sqrt(cfg.laser_power_w * kappa / (HBAR * cfg.omega_l))
    g = cfg.omega_c / cfg.cavity_length_m * math.sqrt(HBAR / (cfg.mirror_mass_kg * om)) * drive / kappa
    nth = K_B * cfg.env_temperature_k * cfg.big_gamma / (HBAR * om * gm)
    sq = cfg.squeeze
    nn = 2.0 * cfg.photon_nth + 1.0
    lam = 16.0 * g**2 / (kappa * nn * sq.s_minus)
    big_lambda = 16.0 * g**2 * sq.s_cross / (kappa * sq.s_minus)
    a = 2.0 * gm * (2.0 * nth + 1.0) + 16.0 * g**2 / kappa * nn * sq.s_plus
    inner = om**2 + 2.0 * big_lambda * om + a * lam
    if inner < 0:
        raise DomainError(f"negative square-root argument in omega_Y ({inner!r}) for mode {s:+d}")
    omega_y = math.sqrt(om * math.sqrt(inner))
    arg = gm**2 - 2.0 * om * (om + big_lambda) + 2.0 * omega_y**2
    if arg < 0:
        raise DomainError(f"negative square-root argument in gamma_Y ({arg!r}) for mode {s:+d}")
    gamma_y = math.sqrt(arg)
    return ModeParams(sign=s, omega=om, g=g, nth=nth, q_factor=om / gm,
                      coop=4.0 * g**2 / (gm * kappa), lam=lam, big_lambda=big_lambda,
                      gamma_y=gamma_y, omega_y=omega_y, gamma_m=gm, kappa=kappa,
                      photon_nth=cfg.photon_nth, squeeze=sq)


def mode_pair(cfg: ExperimentConfig) -> tuple[ModeParams, ModeParams]:
    return derive_mode_params(cfg, +1), derive_mode_params(cfg, -1)


# config files --------------------------------------------------------------

_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"epsilon", "separation_m"}


def config_from_dict(data: dict, sections: tuple[str, ...] = ()) -> tuple[ExperimentConfig, dict]:
    """Build a config from a parsed JSON object.

    Top-level keys are ExperimentConfig field names plus ``grav_coupling``
    (``{"epsilon": x}`` or ``{"separation_m": L}``).  Names listed in
    ``sections`` are passed back untouched; anything else is rejected.
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _FIELDS - {"grav_coupling"} - set(sections)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = {k: data[k] for k in data if k in _FIELDS}
    for k, v in kw.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{k} must be a number, got {v!r}")
        kw[k] = float(v)
    gc = data.get("grav_coupling")
    if gc is not None:
        if not isinstance(gc, dict) or len(gc) != 1 or not set(gc) <= {"epsilon", "separation_m"}:
            raise ConfigError('grav_coupling must be {"epsilon": x} or {"separation_m": L}')
        (k, v), = gc.items()
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"grav_coupling.{k} must be a number, got {v!r}")
        kw[k] = float(v)
    else:
        raise ConfigError("config is missing grav_coupling")
    extras = {k: data[k] for k in sections if k in data}
    return ExperimentConfig(**kw), extras


def load_config(path, sections: tuple[str, ...] = ()) -> tuple[ExperimentConfig, dict]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data, sections)
