"""Descriptive statistics and goodness-of-fit measures for frequency tables.

Chi-square with right-tail cell pooling and an open-ended last cell, the
regularized upper incomplete gamma for its p-value, RMSE over the raw value
cells, and Kullback-Leibler divergence (natural log).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePooling, EmptyData, ModelZeroOnSupport
from .fitting import FrequencyTable, sample_mean, sample_variance

__all__ = [
    "DescriptiveStats",
    "PooledCell",
    "GofReport",
    "descriptive",
    "pool_cells",
    "chi_square_test",
    "gamma_q",
    "rmse",
    "kl_divergence",
    "gof_report",
]


@dataclass(frozen=True)
class DescriptiveStats:
    n_obs: int
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    fraction_zeros: float
    dispersion_index: float


@dataclass(frozen=True)
class PooledCell:
    label: str
    observed: float
    expected: float


@dataclass(frozen=True)
class GofReport:
    chi2: float
    df: int
    p_value: float
    rmse: float
    kl: float
    pooled_cells: tuple[PooledCell, ...]


def descriptive(data: FrequencyTable) -> DescriptiveStats:
    """Summary statistics: N-1 variance; skewness/kurtosis as population
    central-moment ratios m3/m2^1.5 and m4/m2^2 (kurtosis not excess)."""
    n = data.n_total
    if n < 2:
        raise EmptyData("descriptive statistics need at least two observations")
    xbar = sample_mean(data)
    var = sample_variance(data)
    vals = np.array(data.values, dtype=float)
    cnts = np.array(data.counts, dtype=float)
    dev = vals - xbar
    m2 = float(np.dot(cnts, dev ** 2)) / n
    m3 = float(np.dot(cnts, dev ** 3)) / n
    m4 = float(np.dot(cnts, dev ** 4)) / n
    zeros = dict(zip(data.values, data.counts)).get(0, 0)
    return DescriptiveStats(
        n_obs=n,
        mean=xbar,
        variance=var,
        skewness=m3 / m2 ** 1.5,
        kurtosis=m4 / m2 ** 2,
        fraction_zeros=zeros / n,
        dispersion_index=var / xbar,
    )


def pool_cells(observed: FrequencyTable, expected: np.ndarray,
               min_expected: float) -> tuple[PooledCell, ...]:
    """Pool value cells from the right until every expected count reaches
    ``min_expected``.

    ``expected`` holds model probabilities for 0..K (K = max observed value);
    the final cell is open-ended (">=k") and receives the model's tail mass
    beyond K.  Fewer than 3 remaining cells raise DegeneratePooling.
    """
    n = observed.n_total
    k_top = observed.max_value
    probs = np.asarray(expected, dtype=float)
    if probs.size < k_top + 1:
        raise ValueError("expected probabilities must cover all observed values")
    obs = observed.dense_counts()
    exp_counts = n * probs[: k_top + 1]
    tail = n * max(0.0, 1.0 - float(probs[: k_top + 1].sum()))

    cells = [[str(v), float(obs[v]), float(exp_counts[v])] for v in range(k_top + 1)]
    cells.append([f">={k_top + 1}", 0.0, tail])
    while len(cells) > 1 and min(c[2] for c in cells) < min_expected:
        last = cells.pop()
        cells[-1][1] += last[1]
        cells[-1][2] += last[2]
        cells[-1][0] = f">={cells[-1][0].lstrip('>=')}"
    if len(cells) < 3:
        raise DegeneratePooling(f"pooling left only {len(cells)} cells")
    return tuple(PooledCell(label, o, e) for label, o, e in cells)


def gamma_q(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x).

    Series for x < s+1, Lentz continued fraction otherwise; absolute accuracy
    well below 1e-10 over the chi-square range used here.
    """
    if s <= 0 or x < 0:
        raise ValueError("gamma_q needs s > 0 and x >= 0")
    if x == 0.0:
        return 1.0
    lead = math.exp(-x + s * math.log(x) - math.lgamma(s))
    if x < s + 1.0:
        # P(s,x) by series, Q = 1 - P
        term = 1.0 / s
        total = term
        a = s
        for _ in range(500):
            a += 1.0
            term *= x / a
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return 1.0 - lead * total
    # Q(s,x) by modified Lentz continued fraction
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return lead * h


def chi_square_test(observed: FrequencyTable, model_pmf: np.ndarray,
                    n_params: int, min_expected: float) -> tuple[float, int, float]:
    """Pooled chi-square statistic, degrees of freedom and p-value.

    df = (#pooled cells) - 1 - n_params; p = Q(df/2, chi2/2).
    """
    cells = pool_cells(observed, model_pmf, min_expected)
    chi2 = sum((c.observed - c.expected) ** 2 / c.expected for c in cells)
    df = len(cells) - 1 - n_params
    if df < 1:
        raise DegeneratePooling(f"no degrees of freedom left (cells={len(cells)}, "
                                f"params={n_params})")
    return chi2, df, gamma_q(0.5 * df, 0.5 * chi2)


def rmse(observed: FrequencyTable, model_pmf: np.ndarray) -> float:
    """sqrt of the mean squared frequency error over the raw value cells 0..K."""
    obs = observed.dense_counts()
    n = observed.n_total
    k_top = observed.max_value
    probs = np.asarray(model_pmf, dtype=float)[: k_top + 1]
    if probs.size < k_top + 1:
        raise ValueError("model pmf must cover all observed values")
    return float(np.sqrt(np.mean((obs - n * probs) ** 2)))


def kl_divergence(observed: FrequencyTable, model_pmf: np.ndarray) -> float:
    """sum p_emp log(p_emp / p_model) over observed cells with p_emp > 0."""
    n = observed.n_total
    probs = np.asarray(model_pmf, dtype=float)
    total = 0.0
    for v, c in zip(observed.values, observed.counts):
        if c == 0:
            continue
        if v >= probs.size or not probs[v] > 0.0:
            raise ModelZeroOnSupport(f"model has no mass at observed value {v}")
        pe = c / n
        total += pe * math.log(pe / probs[v])
    return total


def gof_report(observed: FrequencyTable, model_pmf: np.ndarray,
               n_params: int, min_expected: float = 1.0) -> GofReport:
    """All goodness-of-fit measures for one fitted model on one data set."""
    chi2, df, p = chi_square_test(observed, model_pmf, n_params, min_expected)
    return GofReport(
        chi2=chi2,
        df=df,
        p_value=p,
        rmse=rmse(observed, model_pmf),
        kl=kl_divergence(observed, model_pmf),
        pooled_cells=pool_cells(observed, model_pmf, min_expected),
    )
