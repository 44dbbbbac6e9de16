"""Independent construction of the LM generating measure via Lagrange inversion.

For the LM variance function m/(1-m/p)^r the natural parameter satisfies
theta = log m - P(m) with P a polynomial (degree r for integer r).  Lagrange's
formula for the inverse of w = m*exp(-P(m)) yields a positive measure nu on
the positive integers,

    nu(n) = (1/(n! n)) * d^(n-1)/dm^(n-1) [ exp(n P(m)) ] at m = 0,

whose convolution exponential e^(p nu) = delta_0 + sum_k p^k nu^(*k) / k!
regenerates the same family.  This module exists to cross-validate the
coefficient-extraction engine in :mod:`countedm.edm`; it is not the
production pmf path.  For r = 2 the derivative has a closed Hermite form,
checked here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import TruncatedSeries, ps_coeff, ps_exp

__all__ = [
    "NuMeasure",
    "p_series",
    "nu_measure",
    "hermite_nu",
    "hermite_value",
    "conv_exponential",
]

# Validation-scale module: convolutions in plain doubles stay exact-ish here.
N_CAP = 64


@dataclass(frozen=True)
class NuMeasure:
    """Levy-type measure on {1, 2, ...}: values[i] is nu(i+1)."""

    values: np.ndarray
    r: int

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def nu(self, n: int) -> float:
        return float(self.values[n - 1])


def p_series(r: int, n: int) -> TruncatedSeries:
    """Polynomial P with theta = log m - P(m): coefficient k is (-1)^(k+1) C(r,k)/k.

    Equivalently -sum_k (-r)_k/(k! k) m^k with the Pochhammer symbol (-r)_k,
    which terminates at k = r for integer r.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    c = np.zeros(n + 1)
    for k in range(1, min(r, n) + 1):
        c[k] = (-1.0) ** (k + 1) * math.comb(r, k) / k
    return TruncatedSeries(c)


def nu_measure(r: int, n_max: int) -> NuMeasure:
    """nu(n) = (1/n^2) [m^(n-1)] exp(n P(m)) for n = 1..n_max.

    The (n-1)-st derivative at 0 equals (n-1)! times the series coefficient,
    and (n-1)!/(n! n) = 1/n^2.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    if not 1 <= n_max <= N_CAP:
        raise ValueError(f"n_max must be in 1..{N_CAP}")
    pol = p_series(r, n_max - 1).coeffs
    vals = np.empty(n_max)
    for n in range(1, n_max + 1):
        e = ps_exp(TruncatedSeries(n * pol[:n]), n - 1)
        vals[n - 1] = ps_coeff(e, n - 1) / (n * n)
    return NuMeasure(values=vals, r=r)


def hermite_value(k: int, x: float) -> float:
    """Physicists' Hermite polynomial H_k(x) by the three-term recurrence."""
    if k < 0:
        raise ValueError("k must be non-negative")
    h_prev, h = 1.0, 2.0 * x
    if k == 0:
        return h_prev
    for i in range(1, k):
        h_prev, h = h, 2.0 * x * h - 2.0 * i * h_prev
    return h


def hermite_nu(n: int) -> float:
    """Closed form of nu(n) for r = 2: (1/(n! n)) H_(n-1)(sqrt(2n)) (n/2)^((n-1)/2).

    From e^(2xt - t^2) = sum_k H_k(x) t^k / k! evaluated at x = sqrt(2n),
    t = sqrt(n/2) m, which turns exp(n(2m - m^2/2)) into a Hermite series.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    h = hermite_value(n - 1, math.sqrt(2.0 * n))
    return h * (0.5 * n) ** (0.5 * (n - 1)) * math.exp(-math.lgamma(n + 1)) / n


def conv_exponential(nu: NuMeasure, p: float, n_max: int) -> np.ndarray:
    """Entries 0..n_max of e^(p nu) = delta_0 + sum_{k>=1} (p^k/k!) nu^(*k).

    nu^(*k)(n) vanishes for n < k (nu has no mass below 1), so the sum for
    entry n stops at k = n; iterated discrete convolution truncated at n_max.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if not 0 <= n_max <= N_CAP:
        raise ValueError(f"n_max must be in 0..{N_CAP}")
    full = np.zeros(n_max + 1)
    full[1 : 1 + min(n_max, nu.values.size)] = nu.values[:n_max]
    out = np.zeros(n_max + 1)
    out[0] = 1.0
    conv = full.copy()
    weight = p
    for k in range(1, n_max + 1):
        out += weight * conv
        weight *= p / (k + 1)
        conv = np.convolve(conv, full)[: n_max + 1]
    return out
