"""Truncated power-series arithmetic at the origin.

A :class:`TruncatedSeries` holds the Taylor coefficients ``c_0 .. c_N`` of an
analytic function at 0; index k is the coefficient of ``m**k``.  All
operations take an explicit truncation order and never promote it silently.
Products use the Cauchy convolution; exp and log use the O(N^2) ODE
recurrences, which are deterministic and avoid series composition.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import IndexBeyondOrder, NonPositiveConstantTerm

__all__ = [
    "TruncatedSeries",
    "ps_mul",
    "ps_exp",
    "ps_log",
    "ps_pow",
    "ps_binomial",
    "ps_coeff",
]


class TruncatedSeries:
    """Coefficients of an analytic function at 0, truncated at a fixed order.

    Immutable; the coefficient array is copied on construction and marked
    read-only.  ``len(coeffs) == order + 1`` always holds and every
    coefficient must be finite.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[float] | np.ndarray):
        arr = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("series needs a one-dimensional, non-empty coefficient list")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series coefficients must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("TruncatedSeries is immutable")

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self) -> int:
        return self.coeffs.size

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncatedSeries) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self) -> str:
        return f"TruncatedSeries({self.coeffs.tolist()!r})"


def _coeffs(a: TruncatedSeries | Sequence[float]) -> np.ndarray:
    if isinstance(a, TruncatedSeries):
        return a.coeffs
    return TruncatedSeries(a).coeffs


def _padded(c: np.ndarray, n: int) -> np.ndarray:
    if c.size >= n + 1:
        return c[: n + 1]
    return np.concatenate([c, np.zeros(n + 1 - c.size)])


def ps_mul(a: TruncatedSeries, b: TruncatedSeries, n: int) -> TruncatedSeries:
    """Cauchy product of two series, truncated at order ``n``."""
    ca, cb = _coeffs(a), _coeffs(b)
    return TruncatedSeries(_padded(np.convolve(ca, cb), n))


def ps_exp(a: TruncatedSeries, n: int) -> TruncatedSeries:
    """exp of a series at order ``n`` via c_k = (1/k) sum_j j a_j c_{k-j}."""
    ca = _coeffs(a)
    c = np.zeros(n + 1)
    c[0] = np.exp(ca[0])
    ja = np.arange(ca.size) * ca  # j * a_j
    for k in range(1, n + 1):
        top = min(k, ca.size - 1)
        c[k] = np.dot(ja[1 : top + 1], c[k - 1 :: -1][:top]) / k
    return TruncatedSeries(c)


def ps_log(a: TruncatedSeries, n: int) -> TruncatedSeries:
    """log of a series at order ``n``; requires a strictly positive constant term."""
    ca = _coeffs(a)
    if ca[0] <= 0.0:
        raise NonPositiveConstantTerm(f"constant term {ca[0]} is not positive")
    ca = _padded(ca, n)
    b = np.zeros(n + 1)
    b[0] = np.log(ca[0])
    for k in range(1, n + 1):
        # k a_k = sum_{j=1..k} j b_j a_{k-j}
        acc = k * ca[k]
        if k > 1:
            j = np.arange(1, k)
            acc -= np.dot(j * b[1:k], ca[k - 1 : 0 : -1])
        b[k] = acc / (k * ca[0])
    return TruncatedSeries(b)


def ps_pow(a: TruncatedSeries, k: int, n: int) -> TruncatedSeries:
    """Integer power ``a**k`` truncated at order ``n`` by incremental products."""
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError("exponent must be a non-negative integer")
    out = TruncatedSeries(_padded(np.array([1.0]), n))
    for _ in range(int(k)):
        out = ps_mul(out, a, n)
    return out


def ps_binomial(alpha: float, n: int) -> TruncatedSeries:
    """Series of (1+m)**alpha: coefficient k is the binomial C(alpha, k).

    Built by the ratio recurrence c_k = c_{k-1} (alpha-k+1)/k, which keeps
    trailing coefficients accurate even when alpha is close to an integer.
    """
    c = np.zeros(n + 1)
    c[0] = 1.0
    for k in range(1, n + 1):
        c[k] = c[k - 1] * (alpha - k + 1) / k
    return TruncatedSeries(c)


def ps_coeff(a: TruncatedSeries, k: int) -> float:
    """Coefficient of m**k; raises if k exceeds the truncation order."""
    ca = _coeffs(a)
    if k < 0 or k >= ca.size:
        raise IndexBeyondOrder(f"index {k} beyond order {ca.size - 1}")
    return float(ca[k])
