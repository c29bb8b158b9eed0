import dataclasses
import math

import numpy as np
import pytest

from squeezed_gie import (ExperimentConfig, GridError, causality_check, derive_mode_params, filter_poles,
                          impulse_response, wiener_filters)
from squeezed_gie.wiener import FrequencyGrid, orthogonality_residual


@pytest.fixture(scope="module")
def modes(cfg):
    return [derive_mode_params(cfg, s) for s in "+-"]


def literal_filters(m, w):
    """Closed forms written out directly from the mode parameters."""
    fp = m.omega_y**2 - 1j * m.gamma_y * w - w**2
    dg, dw2 = m.gamma_y - m.gamma_m, m.omega_y**2 - m.omega**2
    k = math.sqrt(m.kappa) / (4 * m.g)
    hq = k * (dw2 - 1j * w * dg) / fp
    hp = k / m.omega * (-dg * m.omega**2 - 1j * w * (dw2 - dg * m.gamma_m)) / fp
    return hq, hp


def test_literal_forms(modes):
    for m in modes:
        w = np.linspace(-4, 4, 81) * m.omega
        fr = wiener_filters(m, w)
        hq, hp = literal_filters(m, w)
        np.testing.assert_allclose(fr.h_q, hq, rtol=1e-10)
        np.testing.assert_allclose(fr.h_p, hp, rtol=1e-10)


def test_dc_value(modes):
    m = modes[0]
    h = wiener_filters(m, 0.0).h_q
    assert h.imag == 0
    assert h.real == pytest.approx(math.sqrt(m.kappa) / (4 * m.g) * m.domega2 / m.omega_y**2, rel=1e-12)


def test_zero_coupling_limit():
    cfg = ExperimentConfig(epsilon=0.1, laser_power_w=0.0)
    m = derive_mode_params(cfg, "+")
    assert m.gamma_y == pytest.approx(m.gamma_m, rel=1e-12)
    assert m.omega_y == pytest.approx(m.omega, rel=1e-15)
    fr = wiener_filters(m, np.array([0.0, m.omega, 3 * m.omega]))
    assert np.all(fr.h_q == 0) and np.all(fr.h_p == 0)
    small = derive_mode_params(cfg.replace(laser_power_w=1e-20), "+")
    assert abs(wiener_filters(small, small.omega).h_q) < 1e-3 * abs(
        wiener_filters(derive_mode_params(cfg.replace(laser_power_w=1e-10), "+"), small.omega).h_q)


def test_decay_at_infinity(modes):
    m = modes[0]
    big = wiener_filters(m, np.array([1e3, 1e5]) * m.omega)
    assert abs(big.h_q[1]) < abs(big.h_q[0]) < 1e-2 * abs(wiener_filters(m, m.omega).h_q)


def test_poles_lower_half_plane(modes):
    for m in modes:
        p = filter_poles(m)
        assert np.all(p.imag < 0)
        fp = m.omega_y**2 - 1j * m.gamma_y * p - p**2
        assert np.all(np.abs(fp) < 1e-10 * m.omega_y**2)


def test_causality(modes):
    for m in modes:
        rep = causality_check(m)
        assert rep.stable and rep.passed
        assert rep.leakage_q < 1e-6 and rep.leakage_p < 1e-6


def test_impulse_response_matches_transform(modes):
    m = modes[0]
    grid = FrequencyGrid.default_for(m)
    from squeezed_gie.wiener import _inverse_transform

    t = grid.t
    # skip the first 1/gamma_Y, where the jump at t = 0 rings on a finite grid
    keep = (t > 1 / m.gamma_y) & (t < 50 / m.gamma_y)
    fr = wiener_filters(m, grid.omega)
    for which in "qp":
        direct = impulse_response(m, t[keep], which)
        numeric = _inverse_transform(getattr(fr, "h_" + which), grid).real[keep]
        assert np.max(np.abs(numeric - direct)) < 1e-3 * np.max(np.abs(direct))
    assert np.all(impulse_response(m, -t[keep], "q") == 0)


def test_negated_bandwidth_flagged(modes):
    bad = dataclasses.replace(modes[0], gamma_y=-modes[0].gamma_y)
    rep = causality_check(bad)
    assert not rep.stable and not rep.passed
    assert np.all(rep.poles.imag > 0)


def test_coarse_grid_rejected(modes):
    m = modes[0]
    with pytest.raises(GridError):
        causality_check(m, FrequencyGrid(n_points=1024, half_span=5 * m.omega_y))


def test_orthogonality(modes):
    for m in modes:
        res = orthogonality_residual(m)
        assert res["q"] < 1e-4 and res["p"] < 1e-4


def test_general_phase_causality():
    m = derive_mode_params(ExperimentConfig(epsilon=0.25, squeeze_r=0.5, squeeze_phi_rad=math.pi / 4), "+")
    rep = causality_check(m)
    assert rep.passed
