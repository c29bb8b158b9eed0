import math

import mpmath as mp
import numpy as np
import pytest

from squeezed_gie import (ExperimentConfig, EntanglementReport, UnsupportedError, commutator_expectation,
                          condition_no_filter, condition_with_filter, derive_mode_params, e_fil, s_qq,
                          spectral_densities, wiener_filters)
from squeezed_gie.entanglement import correlator_rationals


def test_assembly_identity(cfg):
    rep = e_fil(cfg)
    assert EntanglementReport.assemble(rep.rq2_plus, rep.rp2_minus, rep.comm_sq, rep.freq_ratio) == rep.e_fil
    assert rep.rq2_plus > 0 and rep.rp2_minus > 0 and rep.comm_sq > 0
    assert rep.omega == derive_mode_params(cfg, "+").omega


def test_headline_value(cfg):
    rep = e_fil(cfg)
    assert rep.e_fil == pytest.approx(0.30, abs=1e-9)
    assert rep.entangled


@pytest.mark.parametrize("phi", [0.0, 0.7, math.pi / 2])
def test_residual_spectrum_transcription(phi):
    # |H|^2 S_YY - 2 Re(H* S_qY) + S_qq is twice the stationary conditional correlator
    cfg = ExperimentConfig(epsilon=0.25, squeeze_r=0.8, squeeze_phi_rad=phi)
    for s in "+-":
        m = derive_mode_params(cfg, s)
        w = np.linspace(0.2, 2.5, 17) * m.omega
        sd, h, rat = spectral_densities(m, w), wiener_filters(m, w), correlator_rationals(m)
        sqq = s_qq(m, w)
        spp = (w / m.omega) ** 2 * sqq
        for hh, cross, auto, key in ((h.h_q, sd.s_qy, sqq, "rq2"), (h.h_p, sd.s_py, spp, "rp2")):
            resid = auto - 2 * np.real(np.conj(hh) * cross) + np.abs(hh) ** 2 * sd.s_yy
            np.testing.assert_allclose(resid, 2 * rat[key](w).real, rtol=1e-8)


def test_vacuum_drops_cross_terms(table_cfg):
    cfg = table_cfg.replace(epsilon=0.2, squeeze_r=0.0)
    a = e_fil(cfg.replace(squeeze_phi_rad=0.3))
    b = e_fil(cfg.replace(squeeze_phi_rad=1.2))
    assert a.e_fil == pytest.approx(b.e_fil, rel=1e-12)


def _commutator_mp(m, w):
    mp.mp.dps = 50
    om, gm, gy, wy = (mp.mpf(x) for x in (m.omega, m.gamma_m, m.gamma_y, m.omega_y))
    w = mp.mpf(w)
    dg, dw2 = gy - gm, wy**2 - om**2
    iw = 1j * w
    fp2 = abs(wy**2 - 1j * gy * w - w**2) ** 2
    c = (4 * gm * w * (dg + iw) - 2j * (-dg * om**2 + iw * (dw2 - dg * gm))
         + 2j * (dg + iw) * (dw2 - iw * dg)) / fp2
    return c


def test_commutator_extended_precision(cfg):
    mp_, mm_ = derive_mode_params(cfg, "+"), derive_mode_params(cfg, "-")
    w = mp_.omega
    total = sum(_commutator_mp(m, x) for m in (mp_, mm_) for x in (w, -w))
    ref = abs(total) ** 2 / 256
    assert commutator_expectation(mp_, mm_) == pytest.approx(float(ref), rel=1e-8)


def test_commutator_even_in_frequency(cfg):
    mp_, mm_ = derive_mode_params(cfg, "+"), derive_mode_params(cfg, "-")
    for x in (0.5, 1.0, 1.3):
        w = x * mp_.omega
        assert commutator_expectation(mp_, mm_, -w) == pytest.approx(commutator_expectation(mp_, mm_, w),
                                                                     rel=1e-12)


def test_commutator_zero_filter_limit():
    # without measurement the filtered commutator reduces to its unfiltered value 4 gamma_m w (i w) / |F|^2
    m = derive_mode_params(ExperimentConfig(epsilon=0.2, laser_power_w=0.0), "+")
    w = np.array([0.5, 1.0, 1.5]) * m.omega
    f2 = np.abs(m.omega**2 - 1j * m.gamma_m * w - w**2) ** 2
    c = correlator_rationals(m)["comm_single"](w)
    ref = 4 * m.gamma_m * w * 1j * w / f2
    np.testing.assert_allclose(c, ref, rtol=1e-10, atol=1e-12 * np.max(np.abs(ref)))


def test_separable_bound():
    for r in (0.0, 0.5, 1.0):
        for phi in (0.0, math.pi / 4, math.pi / 2):
            cfg = ExperimentConfig(epsilon=0.0, squeeze_r=r, squeeze_phi_rad=phi, laser_power_w=1e-10)
            om = derive_mode_params(cfg, "+").omega
            for x in np.linspace(0.5, 1.5, 21):
                assert e_fil(cfg, x * om).e_fil >= 1.0


def test_monotonic_in_squeezing(cfg):
    vals = [e_fil(cfg.replace(squeeze_r=r)).e_fil for r in np.linspace(0, 1.5, 31)]
    assert np.all(np.diff(vals) <= 0)


def test_phase_preference(cfg):
    assert e_fil(cfg.replace(squeeze_phi_rad=0.0)).e_fil >= e_fil(cfg).e_fil


def test_condition_no_filter_forms(table_cfg):
    m = derive_mode_params(table_cfg, "+")
    c0 = condition_no_filter(table_cfg.replace(squeeze_r=0.0))
    assert c0.rhs == pytest.approx(2 * (2 * m.nth + 1) + 4 * m.coop, rel=1e-12)
    assert c0.rhs == pytest.approx(17.4, abs=0.1)
    assert c0.terms[0] == pytest.approx(14.7, abs=0.1) and c0.terms[1] == pytest.approx(2.8, abs=0.1)
    rhs = [condition_no_filter(table_cfg.replace(squeeze_r=r)).rhs for r in (0, 0.5, 1.0, 1.5)]
    assert np.all(np.diff(rhs) < 0)
    assert rhs[2] == pytest.approx(2 * (2 * m.nth + 1) + 4 * m.coop * math.exp(-2), rel=1e-12)


def test_condition_with_filter_zero_measurement():
    cfg = ExperimentConfig(epsilon=0.2, laser_power_w=1e-24, squeeze_r=0.5)
    a, b = condition_with_filter(cfg), condition_no_filter(cfg)
    assert a.rhs == pytest.approx(b.rhs, rel=1e-6)


def test_condition_with_filter_phase_guard(cfg):
    with pytest.raises(UnsupportedError):
        condition_with_filter(cfg.replace(squeeze_phi_rad=1.0))


@pytest.fixture(scope="module")
def power_grid(cfg):
    """E_Fil on the (r, log10 P_in) grid of the power sweep, phi = pi/2."""
    rs, ps = np.linspace(0, 1.5, 61), np.geomspace(1e-12, 1e-6, 61)
    e = np.array([[e_fil(cfg.replace(squeeze_r=r, laser_power_w=p)).e_fil for p in ps] for r in rs])
    return rs, ps, e


def test_filtered_condition_frequency_ratio(cfg, power_grid):
    from squeezed_gie import filtered_condition_validity
    rs, ps, e = power_grid
    worst = max(filtered_condition_validity(cfg.replace(squeeze_r=r, laser_power_w=p))[0]
                for i, r in enumerate(rs) for j, p in enumerate(ps) if e[i, j] < 1)
    assert worst < 0.1


def test_filtered_condition_filter_ratio(cfg, power_grid):
    from squeezed_gie import filtered_condition_validity
    rs, ps, e = power_grid
    worst = max(abs(filtered_condition_validity(cfg.replace(squeeze_r=r, laser_power_w=p))[1])
                for i, r in enumerate(rs) for j, p in enumerate(ps) if e[i, j] < 1)
    assert worst < 0.1


def test_filter_terms_cancel_near_boundary(cfg, power_grid):
    rs, ps, e = power_grid
    worst = 0.0
    for i, r in enumerate(rs):
        k = np.nonzero(np.diff(e[i] < 1))[0][0]
        for j in (k, k + 1):
            c = condition_with_filter(cfg.replace(squeeze_r=r, laser_power_w=ps[j]))
            worst = max(worst, abs(c.terms[2] + c.terms[3]) / c.rhs)
    assert worst < 0.1
