"""Four-parameter continuous distribution families.

Density, distribution, quantile, sampling, log-likelihood and closed-form
expected values for the skew-t family group used to model intraday price
spreads, plus the two-parameter normal benchmark.
"""

from .api import (
    cdf_values,
    cdf,
    log_likelihood,
    pdf,
    quantile,
    quantile_levels,
    sample,
    sample_conditional,
)
from .expected import expected_value, st5_shape_from_nu_tau
from .families import logpdf_arrays, st5_shape_closed
from .params import FAMILY_ORDER, LINKS, TAU_CAP, Family, ParamVector, St5Shape, n_params

__all__ = [
    "Family",
    "ParamVector",
    "St5Shape",
    "FAMILY_ORDER",
    "LINKS",
    "TAU_CAP",
    "n_params",
    "pdf",
    "cdf",
    "cdf_values",
    "quantile",
    "quantile_levels",
    "log_likelihood",
    "expected_value",
    "st5_shape_from_nu_tau",
    "st5_shape_closed",
    "sample",
    "sample_conditional",
    "logpdf_arrays",
]
