"""Time-domain check of the cold-damping position spectrum.

State (q, p, z) with the loop filter z' = omega_fb (Y - z), so that the force
-g_cd omega_fb (Y - z) equals -g(w) Y for g(w) = -i w g_cd/(1 - i w/omega_fb).
The linear SDE is discretised exactly (Van Loan) and run as IIR filters.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm
from scipy.signal import lfilter, ss2tf

from ..feedback import FeedbackParams, _require_phase_squeezing
from ..params import HBAR, K_B, ExperimentConfig, derive_mode_params
from .noise import optical_covariance, stream_rng


def feedback_system(cfg: ExperimentConfig, fb: FeedbackParams, sign=+1):
    """Drift A and diffusion D of the (q, p, z) system."""
    _require_phase_squeezing(cfg)
    if math.isinf(fb.omega_fb):
        raise ValueError("the time-domain loop needs a finite omega_fb")
    mode = derive_mode_params(cfg, sign)
    om, al, gam, wf, g = mode.omega, mode.alpha, cfg.big_gamma, fb.omega_fb, fb.g_cd
    a = np.array([[0.0, om, 0.0],
                  [-om - g * wf * al, -gam, g * wf],
                  [wf * al, 0.0, -wf]])
    sigma = np.zeros((3, 3))
    sigma[0, 0] = 2.0 * K_B * cfg.env_temperature_k / (HBAR * om) + 1.0
    sigma[1:, 1:] = optical_covariance(cfg.squeeze, cfg.photon_nth)
    b = np.array([[0.0, 0.0, 0.0],
                  [math.sqrt(2.0 * gam), -al, g * wf],
                  [0.0, 0.0, -wf]])
    return a, b @ sigma @ b.T


def van_loan(a: np.ndarray, d: np.ndarray, dt: float):
    """(Phi, Q): exact one-step propagator and noise covariance of dx = A x dt + dW, <dW dW^T> = D dt."""
    n = a.shape[0]
    m = np.zeros((2 * n, 2 * n))
    m[:n, :n] = -a
    m[:n, n:] = d
    m[n:, n:] = a.T
    e = expm(m * dt)
    phi = e[n:, n:].T
    q = phi @ e[:n, n:]
    return phi, 0.5 * (q + q.T)


def simulate_feedback(cfg: ExperimentConfig, fb: FeedbackParams, dt: float, n_steps: int,
                      seed: int, index: int, burn_in_steps: int = 0, sign=+1) -> np.ndarray:
    """Position record q_k of one feedback-cooled trajectory (burn-in removed)."""
    a, d = feedback_system(cfg, fb, sign)
    phi, q = van_loan(a, d, dt)
    w, v = np.linalg.eigh(q)
    root = v * np.sqrt(np.clip(w, 0.0, None))
    rng = stream_rng(seed, index, "feedback")
    xi = rng.standard_normal((3, burn_in_steps + n_steps))
    c = np.array([[1.0, 0.0, 0.0]])
    out = np.zeros(burn_in_steps + n_steps)
    for i in range(3):
        num, den = ss2tf(phi, root, c, np.zeros((1, 3)), input=i)
        out += lfilter(num[0], den, xi[i])
    return out[burn_in_steps:]
