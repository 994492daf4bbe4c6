"""Zero-modified Poisson-Lindley distribution.

Thin wrapper over the compiled ``_zmpl`` extension. Data arguments accept a
list of counts or a ``{value: frequency}`` dict.
"""

from ._zmpl import (
    DataError,
    DegenerateSample,
    NumericalFailure,
    asymptotic_ci,
    bootstrap,
    cdf,
    coverage_study,
    dataset,
    fisher_info,
    fit_model,
    gradient_test,
    goodness_of_fit,
    log_likelihood,
    mle,
    moment_estimate,
    moments,
    pi_lower_bound,
    pmf,
    point_study,
    quantile,
    run_cli,
    sample,
    survival,
)

__all__ = [
    "DataError",
    "DegenerateSample",
    "NumericalFailure",
    "asymptotic_ci",
    "bootstrap",
    "cdf",
    "coverage_study",
    "dataset",
    "fisher_info",
    "fit_model",
    "gradient_test",
    "goodness_of_fit",
    "log_likelihood",
    "mle",
    "moment_estimate",
    "moments",
    "pi_lower_bound",
    "pmf",
    "point_study",
    "quantile",
    "run_cli",
    "sample",
    "survival",
]
