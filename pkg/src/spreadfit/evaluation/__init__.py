"""Density-forecast evaluation: pinball machinery, model comparison,
rolling-window forecasting."""

from .dm import DMResult, dm_test
from .pinball import (
    TIER_FAILED,
    PinballReport,
    QuantileGrid,
    extract_quantiles,
    pinball_measure,
    pinball_score,
    pinball_value,
    rmse,
)
from .rolling import RollingResult, StepForecast, grid_for_step, rolling_window_run
from .selection import runner_up_gap, select_best

__all__ = [
    "QuantileGrid",
    "TIER_FAILED",
    "extract_quantiles",
    "pinball_value",
    "pinball_score",
    "pinball_measure",
    "PinballReport",
    "rmse",
    "select_best",
    "runner_up_gap",
    "dm_test",
    "DMResult",
    "rolling_window_run",
    "RollingResult",
    "StepForecast",
    "grid_for_step",
]
