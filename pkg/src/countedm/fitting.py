"""Parameter estimation for the count EDM families and the baseline models.

The EDM mean is profiled out: in the mean parameterization the MLE of m for
fixed dispersion is the sample mean, so only the dispersion p needs a 1-d
search (golden section with parabolic acceleration, on log p).  Baselines are
fitted by Nelder-Mead on a box-transformed parameter space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import edm
from .baselines import MODELS, BaselineSpec, baseline_pmf
from .edm import LM, ModelSpec
from .errors import (EmptyData, InvalidParameters, NoInteriorMaximum,
                     NonConvergence, Underdispersed)

__all__ = [
    "FrequencyTable",
    "FitResult",
    "sample_mean",
    "sample_variance",
    "log_likelihood",
    "fit_mle",
    "fit_moments",
    "fit_baseline",
]


@dataclass(frozen=True)
class FrequencyTable:
    """Observed counts per value; the empirical object every fit consumes."""

    values: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.counts) or not self.values:
            raise EmptyData("frequency table needs matching, non-empty value/count lists")
        if any(v < 0 or v != int(v) for v in self.values):
            raise ValueError("values must be non-negative integers")
        if any(c < 0 or c != int(c) for c in self.counts):
            raise ValueError("counts must be non-negative integers")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if self.n_total == 0:
            raise EmptyData("frequency table has zero total count")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "FrequencyTable":
        pairs = sorted(pairs)
        return cls(tuple(v for v, _ in pairs), tuple(c for _, c in pairs))

    @property
    def n_total(self) -> int:
        return sum(self.counts)

    @property
    def max_value(self) -> int:
        return self.values[-1]

    def dense_counts(self) -> np.ndarray:
        """Counts over the contiguous range 0..max_value (zeros filled in)."""
        out = np.zeros(self.max_value + 1)
        for v, c in zip(self.values, self.counts):
            out[v] = c
        return out


@dataclass(frozen=True)
class FitResult:
    """Fitted model plus the log-likelihood it attained."""

    spec: Union[ModelSpec, BaselineSpec]
    m_hat: float
    log_likelihood: float
    method: str
    iterations: int


def sample_mean(data: FrequencyTable) -> float:
    """Weighted mean; the MLE of the EDM mean parameter."""
    n = data.n_total
    return sum(v * c for v, c in zip(data.values, data.counts)) / n


def sample_variance(data: FrequencyTable) -> float:
    """Sample variance with the N-1 denominator."""
    n = data.n_total
    if n < 2:
        raise EmptyData("variance needs at least two observations")
    xbar = sample_mean(data)
    ss = sum(c * (v - xbar) ** 2 for v, c in zip(data.values, data.counts))
    return ss / (n - 1)


def log_likelihood(spec: ModelSpec, m: float, data: FrequencyTable) -> float:
    """Multinomial log-likelihood sum count * log P(X=value)."""
    dist = edm.pmf(spec, m, n_max=data.max_value)
    return float(sum(c * dist.log_pmf[v] for v, c in zip(data.values, data.counts) if c > 0))


# ---------------------------------------------------------------------------
# 1-d profile search: golden section with parabolic acceleration (Brent)
# ---------------------------------------------------------------------------

_GOLD = 0.5 * (3.0 - math.sqrt(5.0))


def _brent_min(g, a, b, tol, maxiter=200):
    """Brent's method (golden section + parabolic steps) on [a, b].

    Absolute tolerance in the argument; returns (x, g(x), iterations).
    """
    e = d = 0.0
    x = w = v = a + _GOLD * (b - a)
    fx = fw = fv = g(x)
    for it in range(1, maxiter + 1):
        xm = 0.5 * (a + b)
        tol1 = tol
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            return x, fx, it
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            etemp = e
            e = d
            if abs(p) >= abs(0.5 * q * etemp) or p <= q * (a - x) or p >= q * (b - x):
                e = (a - x) if x >= xm else (b - x)
                d = _GOLD * e
            else:
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = math.copysign(tol1, xm - x)
        else:
            e = (a - x) if x >= xm else (b - x)
            d = _GOLD * e
        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = g(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx, maxiter


def _bracket_max(f, u0, lo=-math.inf, hi=math.inf, step=0.5, max_expand=40):
    """Walk uphill with doubling steps until the best point is interior.

    Raises NoInteriorMaximum when the function keeps improving toward an
    endpoint for ``max_expand`` doublings (monotone profile).
    """
    um, fm = u0, f(u0)
    for _ in range(max_expand):
        a = max(lo, um - step)
        b = min(hi, um + step)
        fa, fb = f(a), f(b)
        if fm >= fa and fm >= fb and a < um < b:
            return a, b
        if fa > fb:
            if fa > fm:
                um, fm = a, fa
        elif fb > fm:
            um, fm = b, fb
        step *= 2.0
    raise NoInteriorMaximum("profile likelihood has no interior maximum in the "
                            "expanded bracket")


def _moment_p(family: str, r: int, xbar: float, s2: float) -> float:
    if family == edm.ABM:
        return xbar / ((s2 / xbar) ** (1.0 / r) - 1.0)
    return xbar / (1.0 - (xbar / s2) ** (1.0 / r))


def fit_mle(family: str, r: int, data: FrequencyTable) -> FitResult:
    """Profile MLE: m_hat is the sample mean, p maximizes the profile likelihood.

    The search runs on log p to absolute tolerance 1e-8; for LM the bracket is
    kept above the sample mean so the mean stays inside its domain (0, p).
    """
    if len([c for c in data.counts if c > 0]) < 2:
        raise EmptyData("MLE needs at least two distinct observed values")
    xbar = sample_mean(data)
    s2 = sample_variance(data)
    if r == 0:
        spec = ModelSpec(family, 0, 1.0)
        return FitResult(spec, xbar, log_likelihood(spec, xbar, data), "mle", 0)

    lo = math.log(xbar * (1.0 + 1e-6)) if family == LM else -math.inf
    try:
        p0 = _moment_p(family, r, xbar, s2) if s2 > xbar else max(xbar * 2.0, 1.0)
    except (ZeroDivisionError, OverflowError, ValueError):
        p0 = max(xbar * 2.0, 1.0)
    u0 = max(math.log(max(p0, 1e-8)), lo + 0.1 if math.isfinite(lo) else math.log(p0))

    def f(u: float) -> float:
        return log_likelihood(ModelSpec(family, r, math.exp(u)), xbar, data)

    a, b = _bracket_max(f, u0, lo=lo)
    u, neg, its = _brent_min(lambda t: -f(t), a, b, tol=1e-8)
    spec = ModelSpec(family, r, math.exp(u))
    return FitResult(spec, xbar, -neg, "mle", its)


def fit_moments(family: str, r: int, data: FrequencyTable) -> FitResult:
    """Method of moments: m_hat = sample mean, p solves V_p(m_hat) = s^2.

    ABM: p = m/((s2/m)^(1/r) - 1); LM: p = m/(1 - (m/s2)^(1/r)).  Requires
    overdispersion (s2 > m), otherwise no positive p exists.
    """
    if r < 1:
        raise ValueError("moment estimation needs r >= 1")
    xbar = sample_mean(data)
    s2 = sample_variance(data)
    if s2 <= xbar:
        raise Underdispersed(f"sample variance {s2:.6g} <= mean {xbar:.6g}")
    p = _moment_p(family, r, xbar, s2)
    spec = ModelSpec(family, r, p)
    return FitResult(spec, xbar, log_likelihood(spec, xbar, data), "moments", 0)


# ---------------------------------------------------------------------------
# baseline fitting: Nelder-Mead on transformed parameters
# ---------------------------------------------------------------------------

def _t_log(x):
    return math.log(x)


def _inv_log(u):
    return math.exp(u)


def _t_logit(x):
    return math.log(x / (1.0 - x))


def _inv_logit(u):
    return 1.0 / (1.0 + math.exp(-u))


# (name, to-unbounded, from-unbounded) per free parameter, plus initial guesses
# as functions of (mean, variance).
def _inits(model: str, xbar: float, s2: float) -> list[dict[str, float]]:
    over = max(s2 - xbar, 1e-3)
    if model == "nb":
        prob = min(max(xbar / s2, 1e-3), 1.0 - 1e-3)
        size = max(xbar * prob / (1.0 - prob), 1e-3)
        return [{"size": size, "prob": prob}]
    if model == "pig":
        return [{"beta": over / xbar, "mu": xbar},
                {"beta": 1.0, "mu": xbar}]
    if model == "dld":
        return [{"lam": min(max(xbar / (1.0 + xbar), 0.01), 0.95)}]
    if model == "nld":
        return [{"alpha": a, "theta": t}
                for a in (0.5, 0.9, 0.99) for t in (0.1, 0.5)]
    if model == "plb":
        return [{"alpha": a, "beta": b} for a in (1.0, 5.0, 20.0) for b in (0.1, 1.0)]
    if model == "gdp":
        q = min(max(xbar / (1.0 + xbar), 1e-3), 0.999)
        return [{"q": q, "alpha": 0.5}, {"q": q, "alpha": 2.0}]
    if model == "btd":
        return [{"alpha": a, "theta": max(xbar / (a * math.exp(a)), 1e-4)}
                for a in (0.1, 0.5, 1.0)]
    raise InvalidParameters(f"no fitting recipe for model {model!r}")


_TRANSFORMS = {
    "nb": {"size": (_t_log, _inv_log), "prob": (_t_logit, _inv_logit)},
    "pig": {"beta": (_t_log, _inv_log), "mu": (_t_log, _inv_log)},
    "dld": {"lam": (_t_logit, _inv_logit)},
    "nld": {"alpha": (_t_logit, _inv_logit), "theta": (_t_logit, _inv_logit)},
    "plb": {"alpha": (_t_log, _inv_log), "beta": (_t_log, _inv_log)},
    "gdp": {"q": (_t_logit, _inv_logit), "alpha": (_t_log, _inv_log)},
    "btd": {"alpha": (_t_log, _inv_log), "theta": (_t_log, _inv_log)},
}


def baseline_log_likelihood(spec: BaselineSpec, data: FrequencyTable) -> float:
    probs = baseline_pmf(spec, data.max_value)
    ll = 0.0
    for v, c in zip(data.values, data.counts):
        if c == 0:
            continue
        if not probs[v] > 0.0:
            return -math.inf
        ll += c * math.log(probs[v])
    return ll


def fit_baseline(model: str, data: FrequencyTable,
                 fixed: Mapping[str, float] | None = None) -> FitResult:
    """Maximum likelihood for a baseline model by Nelder-Mead.

    Parameters in ``fixed`` are held at the given values.  Positive parameters
    are searched on a log scale and (0,1) parameters on a logit scale; the
    NLD alpha is restricted to (0,1), the branch relevant for overdispersed,
    zero-heavy data.  Convergence: simplex diameter below 1e-9 within 10 000
    iterations.  The Poisson MLE is closed-form (the sample mean).
    """
    from scipy.optimize import minimize

    if model not in MODELS:
        raise InvalidParameters(f"unknown model {model!r}")
    fixed = dict(fixed or {})
    xbar = sample_mean(data)
    s2 = sample_variance(data)

    if model == "poisson":
        spec = BaselineSpec("poisson", {"lam": xbar})
        return FitResult(spec, xbar, baseline_log_likelihood(spec, data), "mle", 0)

    transforms = _TRANSFORMS[model]
    free = [k for k in transforms if k not in fixed]
    if not free:
        spec = BaselineSpec(model, fixed)
        return FitResult(spec, xbar, baseline_log_likelihood(spec, data), "mle", 0)

    def unpack(u: Sequence[float]) -> dict[str, float]:
        params = dict(fixed)
        for name, ui in zip(free, u):
            params[name] = transforms[name][1](ui)
        return params

    def neg_ll(u: np.ndarray) -> float:
        try:
            spec = BaselineSpec(model, unpack(u))
            ll = baseline_log_likelihood(spec, data)
        except (InvalidParameters, OverflowError, ValueError):
            return math.inf
        return math.inf if not math.isfinite(ll) else -ll

    best = None
    total_iters = 0
    for init in _inits(model, xbar, s2):
        u0 = np.array([transforms[k][0](init[k]) for k in free])
        res = minimize(neg_ll, u0, method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-9, "maxiter": 10_000,
                                "maxfev": 20_000})
        total_iters += res.nit
        if res.success and math.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None or not math.isfinite(best.fun):
        raise NonConvergence(f"Nelder-Mead failed to fit {model} within 10000 iterations")
    spec = BaselineSpec(model, unpack(best.x))
    return FitResult(spec, xbar, -best.fun, "mle", total_iters)
