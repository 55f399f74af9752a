"""Exact truncated power series helpers (test oracle only)."""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from hoalg.graded import bernoulli


def series_mul(a, b, order):
    out = [Fraction(0)] * order
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            if i + j >= order:
                break
            out[i + j] += ca * cb
    return out


def series_pow(a, n, order):
    out = [Fraction(0)] * order
    out[0] = Fraction(1)
    for _ in range(n):
        out = series_mul(out, a, order)
    return out


def log1p_series(order):
    """log(1+z) with zero constant term."""
    return [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, order)]


def phi_compose_coefficients(order):
    """Coefficients C_{i,j} of z^i w^j in phi(log(1+z), log(1+w)), where
    phi(x,y) = sum_{i,j} ((-1)^{i+1} B_{i+j}/(i! j!)) x^i y^j."""
    x = log1p_series(order)
    xpow = [series_pow(x, i, order) for i in range(order)]
    out = {}
    for i in range(order):
        for j in range(order):
            if i + j >= order:
                continue
            coeff = Fraction((-1) ** (i + 1)) * bernoulli(i + j) / \
                (factorial(i) * factorial(j))
            if not coeff:
                continue
            for a in range(i, order):
                ca = xpow[i][a]
                if not ca:
                    continue
                for b in range(j, order - 1):
                    cb = xpow[j][b]
                    if cb:
                        out[(a, b)] = out.get((a, b), Fraction(0)) + coeff * ca * cb
    return {k: v for k, v in out.items() if v}
