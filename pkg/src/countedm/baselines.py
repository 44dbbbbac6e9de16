"""Competitor count distributions used in the insurance-claims comparison.

Eight classical two-or-fewer-parameter models, each exposed as a pmf over
0..n_max: Poisson, negative binomial (NB), Poisson-inverse Gaussian (PIG),
discrete Lindley (DLD), new logarithmic (NLD), Poisson-Lindley-Beta prime
(PLB), geometric discrete Pareto (GDP) and Bell-Touchard (BTD).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParameters

__all__ = [
    "MODELS",
    "BaselineSpec",
    "baseline_pmf",
    "touchard",
    "log_gamma",
]

MODELS = ("poisson", "nb", "pig", "dld", "nld", "plb", "gdp", "btd")


@dataclass(frozen=True)
class BaselineSpec:
    """A baseline model token plus its named parameters."""

    model: str
    params: Mapping[str, float]

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidParameters(f"unknown model {self.model!r}; expected one of {MODELS}")
        object.__setattr__(self, "params", dict(self.params))
        _VALIDATORS[self.model](self.params)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0 (C-library Lanczos implementation)."""
    if x <= 0:
        raise ValueError("log_gamma needs x > 0")
    return math.lgamma(x)


def touchard(n: int, theta: float) -> float:
    """Touchard polynomial T_n(theta) = e^-theta sum_k k^n theta^k / k!.

    Evaluated exactly by the Bell-style recurrence
    T_{n+1} = theta * sum_{k<=n} C(n,k) T_k.
    """
    if n < 0 or theta <= 0:
        raise ValueError("need n >= 0 and theta > 0")
    t = [1.0]
    binom = [1.0]  # row of Pascal's triangle for current n
    for k in range(n):
        t.append(theta * sum(b * v for b, v in zip(binom, t)))
        binom = [1.0] + [binom[i] + binom[i + 1] for i in range(k)] + [1.0]
    return t[n]


def _require(cond: bool, msg: str):
    if not cond:
        raise InvalidParameters(msg)


def _finite_pos(params, *names):
    for nm in names:
        v = params.get(nm)
        _require(v is not None and math.isfinite(v) and v > 0, f"{nm} must be finite and > 0")


_VALIDATORS = {
    "poisson": lambda p: _finite_pos(p, "lam"),
    "nb": lambda p: (_finite_pos(p, "size"),
                     _require(0.0 < p.get("prob", -1.0) < 1.0, "prob must be in (0,1)")),
    "pig": lambda p: _finite_pos(p, "beta", "mu"),
    "dld": lambda p: _require(0.0 < p.get("lam", -1.0) < 1.0, "lam must be in (0,1)"),
    "nld": lambda p: (_require(p.get("alpha", 2.0) < 1.0 and p.get("alpha") != 0.0,
                               "alpha must be < 1 and nonzero"),
                      _require(0.0 < p.get("theta", -1.0) < 1.0, "theta must be in (0,1)")),
    "plb": lambda p: _finite_pos(p, "alpha", "beta"),
    "gdp": lambda p: (_require(0.0 < p.get("q", -1.0) <= 1.0, "q must be in (0,1]"),
                      _require(p.get("alpha", -1.0) >= 0.0, "alpha must be >= 0"),
                      _require(p.get("q") < 1.0 or p.get("alpha") > 0.0,
                               "q=1 needs alpha > 0")),
    "btd": lambda p: _finite_pos(p, "alpha", "theta"),
}


def baseline_pmf(spec: BaselineSpec, n_max: int) -> np.ndarray:
    """Probabilities P(X=n), n = 0..n_max, for the given baseline model."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    return _PMFS[spec.model](spec.params, int(n_max))


def _pmf_poisson(params, n_max):
    lam = params["lam"]
    n = np.arange(n_max + 1)
    from scipy.special import gammaln

    return np.exp(-lam + n * math.log(lam) - gammaln(n + 1))


def _pmf_nb(params, n_max):
    size, prob = params["size"], params["prob"]
    from scipy.special import gammaln

    n = np.arange(n_max + 1)
    lp = (gammaln(size + n) - gammaln(size) - gammaln(n + 1)
          + size * math.log(prob) + n * math.log1p(-prob))
    return np.exp(lp)


def _pig_integrand_log(x, n, beta, mu):
    return (-x + n * math.log(x) - math.lgamma(n + 1)
            + math.log(mu) - 0.5 * math.log(2.0 * math.pi * beta * x ** 3)
            - (x - mu) ** 2 / (2.0 * beta * x))


def _pmf_pig(params, n_max):
    """Poisson mixed over an inverse-Gaussian intensity, by adaptive quadrature.

    The mixing density is mu/sqrt(2 pi beta x^3) exp(-(x-mu)^2/(2 beta x));
    integration over (0, inf) is mapped to (0,1) via x = t/(1-t) and handled
    by the Gauss-Kronrod adaptive scheme at 1e-10 relative tolerance.
    """
    beta, mu = params["beta"], params["mu"]
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        def f(t, n=n):
            x = t / (1.0 - t)
            lg = _pig_integrand_log(x, n, beta, mu)
            if lg < -745.0:
                return 0.0
            return math.exp(lg) / (1.0 - t) ** 2

        val, _ = quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-10, limit=200)
        out[n] = val
    return out


def _pmf_dld(params, n_max):
    lam = params["lam"]
    n = np.arange(n_max + 1)
    ll = math.log(lam)
    return lam ** n / (1.0 - ll) * (lam * ll + (1.0 - lam) * (1.0 - (n + 1) * ll))


def _pmf_nld(params, n_max):
    # p_n = [log(1 - a t^n) - log(1 - a t^(n+1))] / log(1 - a); telescopes to 1.
    a, t = params["alpha"], params["theta"]
    n = np.arange(n_max + 1)
    return (np.log1p(-a * t ** n) - np.log1p(-a * t ** (n + 1))) / math.log1p(-a)


def _pmf_plb(params, n_max):
    a, b = params["alpha"], params["beta"]
    n = np.arange(n_max + 1)
    from scipy.special import gammaln

    lead = (math.log(a) + math.log1p(a) + math.lgamma(a + b) - math.lgamma(b))
    lp = lead + gammaln(b + n) - gammaln(a + b + n + 3)
    return np.exp(lp) * ((b + n) * (2.0 + n) + a + 2.0)


def _pmf_gdp(params, n_max):
    q, a = params["q"], params["alpha"]
    n = np.arange(n_max + 1)
    return q ** n / (n + 1.0) ** a - q ** (n + 1) / (n + 2.0) ** a


def _pmf_btd(params, n_max):
    a, th = params["alpha"], params["theta"]
    lead = th * (1.0 - math.exp(a))
    out = np.empty(n_max + 1)
    t = [1.0]
    binom = [1.0]
    for k in range(n_max):
        t.append(th * sum(c * v for c, v in zip(binom, t)))
        binom = [1.0] + [binom[i] + binom[i + 1] for i in range(k)] + [1.0]
    for n in range(n_max + 1):
        out[n] = math.exp(lead + n * math.log(a) - math.lgamma(n + 1)) * t[n]
    return out


_PMFS = {
    "poisson": _pmf_poisson,
    "nb": _pmf_nb,
    "pig": _pmf_pig,
    "dld": _pmf_dld,
    "nld": _pmf_nld,
    "plb": _pmf_plb,
    "gdp": _pmf_gdp,
    "btd": _pmf_btd,
}
