"""Beta-distributed claim-frequency proportions: fitting, Q-Q statistic and Monte-Carlo test."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    BetaBinomialParams,
    BetaParams,
    beta_binomial_moments,
    beta_binomial_pmf,
    beta_moments,
    beta_pdf,
    binomial_conditional_moments,
    sample_beta,
    sample_beta_binomial,
)
from .estimation import PortfolioYear, ProportionSample, empirical_proportions, fit_beta_mom  # noqa: E402
from .gof import QQResult, McTestResult, compute_tn, mc_test, qq_quantiles  # noqa: E402
from .rng import RngSeed  # noqa: E402
from .specfun import ToleranceConfig, beta_quantile, ln_beta, ln_gamma, reg_inc_beta  # noqa: E402

__all__ = [
    "BetaBinomialParams",
    "BetaParams",
    "McTestResult",
    "PortfolioYear",
    "ProportionSample",
    "QQResult",
    "RngSeed",
    "ToleranceConfig",
    "beta_binomial_moments",
    "beta_binomial_pmf",
    "beta_moments",
    "beta_pdf",
    "beta_quantile",
    "binomial_conditional_moments",
    "compute_tn",
    "empirical_proportions",
    "fit_beta_mom",
    "ln_beta",
    "ln_gamma",
    "mc_test",
    "qq_quantiles",
    "reg_inc_beta",
    "sample_beta",
    "sample_beta_binomial",
]
