"""Rational functions of angular frequency held as polynomial ratios.

Polynomials are stored in the scaled variable x = omega/scale so that
coefficients stay O(1) for millihertz oscillators.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import Polynomial


class Rational:
    def __init__(self, num: Polynomial, den: Polynomial, scale: float = 1.0):
        self.num = Polynomial(np.asarray(num.coef, dtype=complex))
        self.den = Polynomial(np.asarray(den.coef, dtype=complex))
        self.scale = float(scale)

    def __call__(self, omega):
        x = np.asarray(omega, dtype=float) / self.scale
        return self.num(x) / self.den(x)

    def poles(self) -> np.ndarray:
        return self.den.roots() * self.scale

    def residue(self, pole: complex) -> complex:
        """Residue at a simple pole given in omega units."""
        x = pole / self.scale
        return self.scale * self.num(x) / self.den.deriv()(x)

    def tail(self, beta: float, order: int, side: int = +1) -> list[complex]:
        """Coefficients c_n, n = 1..order, of the large-|omega| expansion

            R(omega) = sum_n c_n / (omega + i side beta)^n + O(omega^-(order+1)).
        """
        b = side * beta / self.scale
        shift = Polynomial([1j * -b, 1.0])  # x = v - i b
        num = _trim(self.num(shift))
        den = _trim(self.den(shift))
        p, q = num.degree(), den.degree()
        if p >= q:
            raise ValueError("tail expansion needs a strictly proper rational function")
        a = num.coef[::-1]  # a[i] multiplies v^(p-i)
        d = den.coef[::-1]
        kmax = order - (q - p)
        e = []
        for k in range(kmax + 1):
            acc = a[k] if k < len(a) else 0.0
            for j in range(1, min(k, len(d) - 1) + 1):
                acc -= d[j] * e[k - j]
            e.append(acc / d[0])
        out = [0j] * order
        for k, ek in enumerate(e):
            n = k + q - p
            if 1 <= n <= order:
                out[n - 1] = complex(ek) * self.scale**n
        return out


def _trim(poly: Polynomial) -> Polynomial:
    c = np.asarray(poly.coef, dtype=complex)
    k = len(c)
    while k > 1 and c[k - 1] == 0:
        k -= 1
    return Polynomial(c[:k])


def tail_values(coeffs, beta: float, omega, side: int = +1):
    w = np.asarray(omega, dtype=float)
    v = w + 1j * side * beta
    return sum(c / v ** (n + 1) for n, c in enumerate(coeffs))


def causal_tail_time(coeffs, beta: float, t):
    """Inverse transform of sum c_n/(w + i beta)^n: -i sum c_n (-i t)^(n-1) e^(-beta t)/(n-1)!, t >= 0."""
    t = np.asarray(t, dtype=float)
    tp = np.where(t > 0, t, 0.0)
    out = np.zeros_like(t, dtype=complex)
    for n, c in enumerate(coeffs, start=1):
        out += -1j * c * (-1j * tp) ** (n - 1) / math.factorial(n - 1)
    out *= np.exp(-beta * tp)
    # half value at the jump for n = 1, zero elsewhere for t < 0
    return np.where(t > 0, out, np.where(t == 0, 0.5 * (-1j * coeffs[0]) if coeffs else 0.0, 0.0))
