"""ABM and LM exponential dispersion families for count data.

The two families are identified by their variance functions on the mean
domain M:

* ABM:  V_p(m) = m (1 + m/p)^r,      M = (0, inf)
* LM:   V_p(m) = m / (1 - m/p)^r,    M = (0, p)

with integer power ``r >= 0`` and dispersion ``p > 0``; ``r = 0`` is Poisson
for both.  From the variance function alone the module produces the primitives
``psi`` (of 1/V) and ``phi`` (of m/V), the generating measure on the
non-negative integers by power-series coefficient extraction, and from those
the probability mass function in the mean parameterization

    P(X = n) = mu*_n * exp(n*psi_p(m) - phi_p(m)).

Scaling convention: the measure is stored as log(mu~_n) with
mu~_n = mu*_n / p**n, whose p**n factor cancels against the log(m/p) leading
term of psi inside the pmf exponent.  This keeps every stored quantity in
double-precision range for the truncation lengths used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import MeanOutOfDomain, MeasureOverflow, UnboundedMeasure
from .series import TruncatedSeries, ps_binomial, ps_exp, ps_mul

__all__ = [
    "ABM",
    "LM",
    "R_MAX",
    "ModelSpec",
    "GeneratingMeasure",
    "CountDistribution",
    "variance",
    "mean_domain",
    "psi",
    "phi",
    "g_func",
    "generating_measure",
    "pmf",
    "zero_prob",
    "cumulant",
    "skewness",
    "excess_kurtosis",
    "total_mass",
]

ABM = "abm"
LM = "lm"

# Closed-form sums are valid for any r, but the numerics are only exercised
# up to this power; raise deliberately rather than return untested values.
R_MAX = 16

# Adaptive truncation defaults (see pmf()).
TAIL_TERM_TOL = 1e-12
TAIL_MASS_TOL = 1e-10
N_MAX_CAP = 10_000


@dataclass(frozen=True)
class ModelSpec:
    """One family member: (family, variance-function power r, dispersion p)."""

    family: str
    r: int
    p: float

    def __post_init__(self):
        if self.family not in (ABM, LM):
            raise ValueError(f"unknown family {self.family!r}; expected 'abm' or 'lm'")
        if not isinstance(self.r, (int, np.integer)) or isinstance(self.r, bool):
            raise ValueError("power r must be an integer")
        if not 0 <= self.r <= R_MAX:
            raise ValueError(f"power r must be in 0..{R_MAX}")
        if not (isinstance(self.p, (int, float, np.floating)) and math.isfinite(self.p)
                and self.p > 0):
            raise ValueError("dispersion p must be finite and positive")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True)
class GeneratingMeasure:
    """Scaled generating measure: entry n holds log(mu~_n) = log(mu*_n / p**n).

    ``g0`` is the boundary value G_p(0) = p used for the scaling; mu~_0 = 1
    always (the phi(0) = 0 normalization forces mu*_0 = 1).
    """

    spec: ModelSpec
    log_scaled: np.ndarray
    g0: float
    n_max: int

    def __post_init__(self):
        arr = np.asarray(self.log_scaled, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "log_scaled", arr)


@dataclass(frozen=True)
class CountDistribution:
    """log-pmf of one family member over 0..n_max at a fixed mean."""

    spec: ModelSpec
    mean: float
    log_pmf: np.ndarray
    n_max: int

    def __post_init__(self):
        arr = np.asarray(self.log_pmf, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "log_pmf", arr)

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_pmf)


# ---------------------------------------------------------------------------
# variance function, mean domain and closed-form primitives
# ---------------------------------------------------------------------------

def mean_domain(spec: ModelSpec) -> tuple[float, float]:
    """Open mean domain: (0, inf) for ABM, (0, p) for LM."""
    return (0.0, math.inf) if spec.family == ABM else (0.0, spec.p)


def _check_mean(spec: ModelSpec, m: float) -> float:
    m = float(m)
    lo, hi = mean_domain(spec)
    if not (math.isfinite(m) and lo < m < hi):
        raise MeanOutOfDomain(f"mean {m} outside open domain ({lo}, {hi}) "
                              f"of {spec.family} with p={spec.p}")
    return m


def variance(spec: ModelSpec, m: float) -> float:
    """Variance function V_p(m) of the family member."""
    m = _check_mean(spec, m)
    if spec.family == ABM:
        return m * (1.0 + m / spec.p) ** spec.r
    return m / (1.0 - m / spec.p) ** spec.r


def psi(spec: ModelSpec, m: float) -> float:
    """Primitive of 1/V_p normalized so that G_p(m) = m*exp(-psi) has G_p(0) = p.

    ABM: log(m/(m+p)) + sum_{j=1}^{r-1} (1/j)((p/(m+p))**j - 1)
    LM : log(m/p)     + sum_{i=1}^{r} (-1)**i (1/i) C(r,i) (m/p)**i
    """
    m = _check_mean(spec, m)
    r, p = spec.r, spec.p
    if spec.family == ABM:
        y = p / (m + p)
        s = sum((y ** j - 1.0) / j for j in range(1, r))
        return math.log(m / (m + p)) + s
    x = m / p
    s = sum((-1.0) ** i * math.comb(r, i) / i * x ** i for i in range(1, r + 1))
    return math.log(x) + s


def phi(spec: ModelSpec, m: float) -> float:
    """Primitive of m/V_p with phi_p(0) = 0; exp(-phi) is the zero probability.

    ABM r=1: p log((m+p)/p); ABM r>=2: (p/(r-1))(1 - (p/(m+p))**(r-1));
    LM: (p/(r+1))(1 - (1-m/p)**(r+1)); r=0 either family: m.
    """
    m = _check_mean(spec, m)
    return _phi_unchecked(spec, m)


def _phi_unchecked(spec: ModelSpec, m: float) -> float:
    r, p = spec.r, spec.p
    if r == 0:
        return m
    if spec.family == ABM:
        if r == 1:
            return p * math.log((m + p) / p)
        return p / (r - 1) * (1.0 - (p / (m + p)) ** (r - 1))
    return p / (r + 1) * (1.0 - (1.0 - m / p) ** (r + 1))


def g_func(spec: ModelSpec, m: float) -> float:
    """G_p(m) = m * exp(-psi_p(m)), extended by its limit G_p(0) = p at m = 0.

    Closed forms (consistent with the definition; the ABM sum enters with a
    minus sign so that m*exp(-psi) is reproduced exactly):

    ABM: (m+p) * exp(-sum_{j=1}^{r-1} (1/j)((p/(m+p))**j - 1))
    LM :  p    * exp(-sum_{i=1}^{r} (-1)**i (1/i) C(r,i) (m/p)**i)
    """
    m = float(m)
    if m == 0.0:
        return spec.p
    lo, hi = mean_domain(spec)
    if not (math.isfinite(m) and 0.0 < m < hi):
        raise MeanOutOfDomain(f"g_func needs m in [0, {hi}); got {m}")
    r, p = spec.r, spec.p
    if spec.family == ABM:
        y = p / (m + p)
        s = sum((y ** j - 1.0) / j for j in range(1, r))
        return (m + p) * math.exp(-s)
    x = m / p
    s = sum((-1.0) ** i * math.comb(r, i) / i * x ** i for i in range(1, r + 1))
    return p * math.exp(-s)


# ---------------------------------------------------------------------------
# generating measure
# ---------------------------------------------------------------------------

def _base_series(spec: ModelSpec, order: int):
    """Series at 0, in the variable x = m/p, of the three measure factors.

    Returns (E, D, Ghat): E = exp(phi_p), D = phi_p' and Ghat = G_p/p, each a
    TruncatedSeries of the given order.  phi_p' is (1+x)^{-r} for ABM and
    (1-x)^r for LM; phi_p is its term-by-term integral scaled by p (d m = p dx).
    """
    r, p = spec.r, spec.p
    n = order
    if spec.family == ABM:
        d = ps_binomial(-r, n).coeffs
        # S = sum_{j=1}^{r-1} (1/j)((1+x)^{-j} - 1); Ghat = (1+x) exp(-S)
        s = np.zeros(n + 1)
        for j in range(1, r):
            s += ps_binomial(-j, n).coeffs / j
        s[0] = 0.0
        one_plus_x = np.zeros(n + 1)
        one_plus_x[0] = 1.0
        if n >= 1:
            one_plus_x[1] = 1.0
        ghat = ps_mul(TruncatedSeries(one_plus_x), ps_exp(TruncatedSeries(-s), n), n)
    else:
        d = np.zeros(n + 1)
        for k in range(0, min(r, n) + 1):
            d[k] = math.comb(r, k) * (-1.0) ** k
        # psi~ = sum_{i=1}^{r} (-1)^i (1/i) C(r,i) x^i ; Ghat = exp(-psi~)
        psit = np.zeros(n + 1)
        for i in range(1, min(r, n) + 1):
            psit[i] = (-1.0) ** i * math.comb(r, i) / i
        ghat = ps_exp(TruncatedSeries(-psit), n)
    phi_c = np.zeros(n + 1)
    if n >= 1:
        phi_c[1:] = p * d[:n] / np.arange(1, n + 1)
    e = ps_exp(TruncatedSeries(phi_c), n)
    return e, TruncatedSeries(d), ghat


def generating_measure(spec: ModelSpec, n_max: int) -> GeneratingMeasure:
    """Scaled generating measure entries log(mu~_n), n = 0..n_max.

    mu*_n is (1/n) times the coefficient of m^(n-1) in
    exp(phi_p(m)) * phi_p'(m) * G_p(m)^n, all three factors expanded at 0;
    the stored value is log(mu*_n / p**n).  G^n is accumulated incrementally
    (one truncated product per n) with a running log rescale so coefficient
    arrays never leave double range.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    log_scaled = _measure_log_scaled(spec, int(n_max))
    return GeneratingMeasure(spec=spec, log_scaled=log_scaled, g0=spec.p, n_max=int(n_max))


@lru_cache(maxsize=256)
def _measure_cached(spec: ModelSpec, n_max: int) -> np.ndarray:
    arr = _measure_log_scaled(spec, n_max)
    arr.flags.writeable = False
    return arr


def _measure_log_scaled(spec: ModelSpec, n_max: int) -> np.ndarray:
    r, p = spec.r, spec.p
    out = np.zeros(n_max + 1)
    if n_max == 0:
        return out
    if r == 0:
        # Poisson member: mu*_n = p^n/n! for both families.
        out[1:] = -np.cumsum(np.log(np.arange(1, n_max + 1)))
        return out
    if spec.family == ABM and r == 1:
        # exp(phi) phi' G^n collapses to p^n (1+x)^(n+p-1); the direct binomial
        # ratio recurrence keeps the trailing coefficient accurate for
        # non-integer p, where the generic convolution loses ~8 digits by n=30.
        for n in range(1, n_max + 1):
            c = ps_binomial(n + p - 1.0, n - 1).coeffs[n - 1]
            out[n] = math.log(c) + (1 - n) * math.log(p) - math.log(n)
        return out

    order = n_max - 1
    e, d, ghat = _base_series(spec, order)
    ed = ps_mul(e, d, order).coeffs
    gh = ghat.coeffs
    h = np.zeros(order + 1)
    h[0] = 1.0
    log_h = 0.0
    log_p = math.log(p)
    for n in range(1, n_max + 1):
        h = np.convolve(h, gh)[: order + 1]
        mx = float(np.max(np.abs(h)))
        if not math.isfinite(mx) or mx == 0.0:
            raise MeasureOverflow(f"measure series left double range at n={n} for {spec}")
        h /= mx
        log_h += math.log(mx)
        k = n - 1
        val = float(np.dot(ed[: k + 1], h[k :: -1][: k + 1]))
        if not val > 0.0:
            raise MeasureOverflow(
                f"measure entry n={n} lost positivity (double-precision limit) for {spec}")
        out[n] = math.log(val) + log_h + (1 - n) * log_p - math.log(n)
    return out


# ---------------------------------------------------------------------------
# pmf
# ---------------------------------------------------------------------------

def _log_pmf_arr(spec: ModelSpec, m: float, n_max: int) -> np.ndarray:
    log_mu = _measure_cached(spec, n_max)
    n = np.arange(n_max + 1)
    return log_mu + n * (math.log(spec.p) + psi(spec, m)) - phi(spec, m)


def pmf(spec: ModelSpec, m: float, n_max: int | None = None, *,
        tail_term_tol: float = TAIL_TERM_TOL,
        tail_mass_tol: float = TAIL_MASS_TOL) -> CountDistribution:
    """Count distribution at mean ``m``: log P(X=n) for n = 0..n_max.

    log P(X=n) = log(mu~_n) + n (log p + psi_p(m)) - phi_p(m); the p**n inside
    mu~ cancels the -n log p hidden in psi, so both factors stay representable.
    With ``n_max=None`` the truncation is grown until the last term falls
    below ``tail_term_tol`` and the accumulated mass is within
    ``tail_mass_tol`` of 1 (hard cap 10 000).
    """
    m = _check_mean(spec, m)
    if n_max is not None:
        return CountDistribution(spec, m, _log_pmf_arr(spec, m, int(n_max)), int(n_max))

    v = variance(spec, m)
    n = int(min(N_MAX_CAP, max(32, math.ceil(m + 10.0 * math.sqrt(v) + 10))))
    while True:
        lp = _log_pmf_arr(spec, m, n)
        total = float(np.exp(lp).sum())
        if (lp[-1] < math.log(tail_term_tol) and total >= 1.0 - tail_mass_tol):
            return CountDistribution(spec, m, lp, n)
        if n >= N_MAX_CAP:
            raise MeasureOverflow(
                f"adaptive truncation exceeded cap {N_MAX_CAP} for {spec} at m={m}")
        n = min(N_MAX_CAP, 2 * n)


def zero_prob(spec: ModelSpec, m: float) -> float:
    """P(X = 0) = exp(-phi_p(m))."""
    m = _check_mean(spec, m)
    return math.exp(-_phi_unchecked(spec, m))


# ---------------------------------------------------------------------------
# cumulants via the L(V) = V V' operator on a local Taylor expansion
# ---------------------------------------------------------------------------

def _variance_taylor(spec: ModelSpec, m: float, order: int) -> np.ndarray:
    """Taylor coefficients of V_p around the point m (exact closed expansions)."""
    r, p = spec.r, spec.p
    c = np.zeros(order + 1)
    if spec.family == ABM:
        a = 1.0 + m / p  # (1 + (m+d)/p)^r = a^r (1 + d/(p a))^r
        bin_ = ps_binomial(float(r), order).coeffs
        base = bin_ * (a ** r) / (p * a) ** np.arange(order + 1)
    else:
        b = 1.0 - m / p  # (1 - (m+d)/p)^-r = b^-r (1 - d/(p b))^-r
        bin_ = ps_binomial(float(-r), order).coeffs
        base = bin_ * (b ** -r) / (-p * b) ** np.arange(order + 1)
    # multiply by (m + d)
    c[:] = m * base
    c[1:] += base[:-1]
    return c


def _series_derivative(c: np.ndarray) -> np.ndarray:
    if c.size == 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, c.size)


def cumulant(spec: ModelSpec, m: float, j: int) -> float:
    """j-th cumulant at mean m: m for j=1, and L_{j-2}(V)(m) for j >= 2.

    L(V) = V V' iterated on the Taylor expansion of V around m; evaluation is
    the constant term.  For j=2 this is the variance function itself.
    """
    if j < 1:
        raise ValueError("cumulant order must be >= 1")
    m = _check_mean(spec, m)
    if j == 1:
        return m
    c = _variance_taylor(spec, m, j)
    for _ in range(j - 2):
        d = _series_derivative(c)
        c = np.convolve(c, d)[: c.size - 1]
    return float(c[0])


def skewness(spec: ModelSpec, m: float) -> float:
    """k3 / k2^(3/2)."""
    return cumulant(spec, m, 3) / cumulant(spec, m, 2) ** 1.5


def excess_kurtosis(spec: ModelSpec, m: float) -> float:
    """k4 / k2^2, equivalently (V')^2/V + V'' at m."""
    return cumulant(spec, m, 4) / cumulant(spec, m, 2) ** 2


# ---------------------------------------------------------------------------
# total mass (bounded ABM members)
# ---------------------------------------------------------------------------

def _boundary_shift(spec: ModelSpec) -> float:
    """sup of psi_p over the mean domain (the natural-parameter upper endpoint).

    With the G_p(0) = p normalization this is -H_{r-1} for ABM (limit at
    m -> inf) and -H_r for LM (value at m = p).
    """
    r = spec.r
    if spec.family == ABM:
        return -sum(1.0 / j for j in range(1, r))
    return -sum(1.0 / i for i in range(1, r + 1))


def _bounded_entries(spec: ModelSpec, n_max: int) -> np.ndarray:
    """Entries of the bounded representative mu*_n * exp(-q n), q = sup psi."""
    log_mu = _measure_cached(spec, n_max)
    n = np.arange(n_max + 1)
    return np.exp(log_mu + n * (math.log(spec.p) + _boundary_shift(spec)))


# Truncation point for the adaptive estimate: inside the double-precision
# viability range of the ABM pipeline (entries good to ~1e-6 at n ~ 120).
_MASS_N = 120
_MASS_FIT_N1 = 90


def total_mass(spec: ModelSpec, n_max: int | None = None) -> float:
    """Mass of the bounded measure representative; converges to e^(p/(r-1)).

    Only ABM members with r >= 2 have a bounded measure (natural-parameter
    domain closed at its upper endpoint); the summed entries are
    mu*_n e^(-q n) with q = sup psi_p, the exponential shift under which the
    measure is finite.  With explicit ``n_max`` this is the plain partial sum.
    With ``n_max=None`` the tail beyond n=120 is estimated from the known
    boundary decay mu_n ~ n^-(2-1/r): a two-term power-law fit summed with
    Hurwitz zeta values.  The partial sums alone converge only like
    N^-(1-1/r), far too slowly to observe the limit directly.
    """
    if spec.family != ABM or spec.r < 2:
        raise UnboundedMeasure(
            f"{spec.family} r={spec.r} has no finite total mass; need ABM with r >= 2")
    if n_max is not None:
        return float(_bounded_entries(spec, int(n_max)).sum())

    from scipy.special import zeta

    n2 = _MASS_N
    n1 = _MASS_FIT_N1
    mu = _bounded_entries(spec, n2)
    alpha = 2.0 - 1.0 / spec.r
    f1 = mu[n1] * n1 ** alpha
    f2 = mu[n2] * n2 ** alpha
    b = (f1 - f2) / (1.0 / n1 - 1.0 / n2)
    c = f2 - b / n2
    tail = c * zeta(alpha, n2 + 1) + b * zeta(alpha + 1, n2 + 1)
    return float(mu.sum() + tail)
