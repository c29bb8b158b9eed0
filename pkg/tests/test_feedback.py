import math

import numpy as np
import pytest

from squeezed_gie import (ConfigError, FeedbackParams, UnsupportedError, derive_mode_params, fb_bounds,
                          fb_noise_condition, fb_sqq, fb_transfer)
from squeezed_gie.feedback import thermal_drive
from squeezed_gie.params import HBAR, K_B


def test_transfer_examples():
    fb = FeedbackParams(g_cd=0.3, omega_fb=2.0)
    assert fb_transfer(fb, 0.0) == 0
    assert abs(fb_transfer(fb, 2.0)) == pytest.approx(0.3 * 2.0 / math.sqrt(2), rel=1e-14)
    w = np.linspace(-3, 3, 7)
    assert np.all(fb_transfer(FeedbackParams(g_cd=0.3), w) == -1j * w * 0.3)
    big = FeedbackParams(g_cd=0.3, omega_fb=1e12)
    np.testing.assert_allclose(fb_transfer(big, w), -1j * w * 0.3, rtol=1e-11)


def test_params_validation():
    for kw in ({"g_cd": -1.0}, {"g_cd": math.inf}, {"omega_fb": 0.0}, {"margin": 0.0}, {"margin": 1.5}):
        with pytest.raises(ConfigError):
            FeedbackParams(**kw)


def test_no_feedback_spectrum(cfg):
    m = derive_mode_params(cfg, "+")
    w = np.linspace(0.5, 1.5, 11) * m.omega
    nn = 2 * cfg.photon_nth + 1
    drive = thermal_drive(cfg, m.omega) + m.alpha**2 * nn * math.exp(-2 * cfg.squeeze_r)
    ref = m.omega**2 * drive / np.abs(m.omega**2 - 1j * cfg.big_gamma * w - w**2) ** 2
    np.testing.assert_allclose(fb_sqq(cfg, FeedbackParams(), w), ref, rtol=1e-13)


def test_ideal_loop_is_damped_lorentzian(cfg):
    # derivative feedback only adds damping alpha Omega g_cd and the injected e^2r noise
    g = 0.1
    m = derive_mode_params(cfg, "+")
    w = np.linspace(0.5, 1.5, 11) * m.omega
    nn = 2 * cfg.photon_nth + 1
    gm = cfg.big_gamma + m.alpha * m.omega * g
    drive = (thermal_drive(cfg, m.omega) + m.alpha**2 * nn * math.exp(-2 * cfg.squeeze_r)
             + g**2 * w**2 * nn * math.exp(2 * cfg.squeeze_r))
    ref = m.omega**2 * drive / np.abs(m.omega**2 - 1j * gm * w - w**2) ** 2
    np.testing.assert_allclose(fb_sqq(cfg, FeedbackParams(g_cd=g), w), ref, rtol=1e-12)


def test_phase_guard(cfg):
    with pytest.raises(UnsupportedError):
        fb_sqq(cfg.replace(squeeze_phi_rad=0.0), FeedbackParams(g_cd=0.1), 1e-3)


def test_bound_closed_form(cfg):
    b = fb_bounds(cfg, 0.1)
    om = derive_mode_params(cfg, "+").omega
    ref = 0.1 * math.sqrt(4 * K_B * cfg.env_temperature_k * cfg.big_gamma / (HBAR * om**3 * math.exp(2)))
    assert b.g_cd_max == pytest.approx(ref, rel=1e-14)
    m = derive_mode_params(cfg, "+")
    assert b.gamma_m_eff == pytest.approx(cfg.big_gamma + m.alpha * m.omega * b.g_cd_max, rel=1e-14)
    assert set(b.per_mode) == {1, -1}


def test_bound_squeezing_scaling(cfg):
    a, b = fb_bounds(cfg.replace(squeeze_r=1.0)), fb_bounds(cfg.replace(squeeze_r=2.0))
    assert a.g_cd_max / b.g_cd_max == pytest.approx(math.e, rel=1e-12)


def test_noise_condition_brackets_bound(cfg):
    margin = 0.1
    for s in (+1, -1):
        gmax = fb_bounds(cfg, margin).per_mode[s][0]
        assert fb_noise_condition(cfg, gmax * margin, s).satisfied
        assert not fb_noise_condition(cfg, gmax / margin, s).satisfied


def test_feedback_to_thermal_ratio_at_bound(cfg):
    # at the admissible gain the injected noise is margin^2 of the thermal amplitude bound
    b = fb_bounds(cfg, 0.1)
    m = derive_mode_params(cfg, "+")
    nn = 2 * cfg.photon_nth + 1
    inj = b.g_cd_max**2 * m.omega**2 * nn * math.exp(2 * cfg.squeeze_r)
    thermal_amp = 4 * cfg.big_gamma * K_B * cfg.env_temperature_k / (HBAR * m.omega)
    assert inj / thermal_amp == pytest.approx(0.01, rel=1e-12)


def test_damping_fixed_point(cfg):
    b = fb_bounds(cfg)
    hz = b.gamma_m_eff / (2 * math.pi)
    again = fb_bounds(cfg.replace(fb_damping_hz=hz))
    assert again.gamma_m_eff == pytest.approx(b.gamma_m_eff, rel=0.01)
