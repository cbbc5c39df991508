"""Linear distributional regression over the four parameter equations."""

from .fit import (
    fit,
    intercept_only_fit,
    loglik_from_params,
    predict_params,
    predict_params_matrix,
)
from .model import INTERCEPT, DesignMatrix, EliminationStep, FitConfig, FittedModel
from .selection import specify, wald_pvalues

__all__ = [
    "DesignMatrix",
    "FitConfig",
    "FittedModel",
    "EliminationStep",
    "INTERCEPT",
    "fit",
    "intercept_only_fit",
    "specify",
    "wald_pvalues",
    "predict_params",
    "predict_params_matrix",
    "loglik_from_params",
]
