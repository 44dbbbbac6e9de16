"""Count-data exponential dispersion models built from variance functions.

Two families of overdispersed, zero-inflated counting distributions (ABM:
V = m(1+m/p)^r on (0, inf); LM: V = m/(1-m/p)^r on (0, p)) whose probability
mass functions are computed from the variance function alone via
truncated-power-series coefficient extraction, together with maximum
likelihood / method-of-moments fitting, classical baseline count models, and
chi-square / RMSE / KL goodness-of-fit reporting.
"""

from .baselines import MODELS, BaselineSpec, baseline_pmf, log_gamma, touchard
from .edm import (ABM, LM, CountDistribution, GeneratingMeasure, ModelSpec,
                  cumulant, excess_kurtosis, g_func, generating_measure,
                  mean_domain, pmf, phi, psi, skewness, total_mass, variance,
                  zero_prob)
from .errors import CountEdmError
from .fitting import (FitResult, FrequencyTable, fit_baseline, fit_mle,
                      fit_moments, log_likelihood, sample_mean,
                      sample_variance)
from .gof import (DescriptiveStats, GofReport, chi_square_test, descriptive,
                  gamma_q, gof_report, kl_divergence, pool_cells, rmse)
from .lagrange import NuMeasure, conv_exponential, hermite_nu, nu_measure, p_series
from .series import (TruncatedSeries, ps_binomial, ps_coeff, ps_exp, ps_log,
                     ps_mul, ps_pow)

__version__ = "0.1.0"
