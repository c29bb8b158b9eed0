"""White-noise inputs of the classical-equivalent Langevin model.

Every draw is a step-averaged noise density: a white process with
symmetrised autocorrelation C delta(t - t') averaged over a step dt has
variance C/dt.  Streams are keyed by (seed, trajectory index, stream id)
through a counter-based generator, so any trajectory can be regenerated
on its own and parallel runs are bit-identical to serial ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..params import ModeParams, SqueezeFactors

_U64 = 2**64
STREAMS = {+1: 0, -1: 1, "feedback": 2}


def stream_rng(seed: int, index: int, stream=+1) -> np.random.Generator:
    """Philox generator for one (seed, trajectory, stream) triple."""
    sid = STREAMS[stream]
    key = (int(seed) % _U64) | (((int(index) << 2) | sid) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def optical_covariance(sq: SqueezeFactors, photon_nth: float = 0.0) -> np.ndarray:
    """(2 N_th + 1) [[s_plus, s_cross], [s_cross, s_minus]] for (x_in, y_in)."""
    nn = 2.0 * photon_nth + 1.0
    return nn * np.array([[sq.s_plus, sq.s_cross], [sq.s_cross, sq.s_minus]])


def sqrtm_2x2(m: np.ndarray) -> np.ndarray:
    """Symmetric square root of a 2x2 positive semi-definite matrix (closed form)."""
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    sd = math.sqrt(max(det, 0.0))
    return (m + sd * np.eye(2)) / math.sqrt(m[0, 0] + m[1, 1] + 2.0 * sd)


@dataclass(frozen=True)
class NoiseDraw:
    """Step-averaged noise densities, each of shape (..., n_steps)."""

    dt: float
    p_in: np.ndarray
    x_in: np.ndarray
    y_in: np.ndarray

    def coarsen(self, factor: int = 2) -> "NoiseDraw":
        """Average consecutive steps: the same Brownian path seen at step factor*dt."""
        def avg(a):
            n = a.shape[-1] // factor * factor
            return a[..., :n].reshape(*a.shape[:-1], -1, factor).mean(axis=-1)
        return NoiseDraw(self.dt * factor, avg(self.p_in), avg(self.x_in), avg(self.y_in))


def draw_noise(mode: ModeParams, n_steps: int, dt: float, rng: np.random.Generator,
               shape: tuple[int, ...] = ()) -> NoiseDraw:
    z = rng.standard_normal((3, *shape, n_steps))
    scale = 1.0 / math.sqrt(dt)
    p = math.sqrt(2.0 * mode.nth + 1.0) * scale * z[0]
    root = sqrtm_2x2(optical_covariance(mode.squeeze, mode.photon_nth)) * scale
    x = root[0, 0] * z[1] + root[0, 1] * z[2]
    y = root[1, 0] * z[1] + root[1, 1] * z[2]
    return NoiseDraw(dt, p, x, y)
