"""Rolling-window re-specification, re-estimation and one-step forecasts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dists import Family, ParamVector, expected_value
from ..errors import NonConvergence, SingularDesign, SpreadfitError
from ..gamlss import DesignMatrix, FitConfig, predict_params, specify
from .pinball import TIER_FAILED, QuantileGrid, extract_quantiles

DEFAULT_MAX_MISSING = 200


@dataclass
class StepForecast:
    """One forecasted step: parameters, expected value, grid provenance."""

    step: int
    params: ParamVector | None
    expected: float
    tier: int
    missing: bool


@dataclass
class RollingResult:
    family: Family
    forecasts: list[StepForecast]
    unavailable: bool
    window: int
    horizon: int

    @property
    def n_missing(self) -> int:
        return sum(f.missing for f in self.forecasts)

    def expected_series(self) -> np.ndarray:
        return np.array([f.expected for f in self.forecasts])


def rolling_window_run(
    y,
    X: DesignMatrix,
    family: Family,
    window: int,
    horizon: int,
    config: FitConfig | None = None,
    max_missing: int = DEFAULT_MAX_MISSING,
    extract_grids: bool = True,
) -> RollingResult:
    """Re-specify and re-estimate over a window advanced one step at a time.

    Each step trains on rows [i, i+window) and forecasts row i+window
    from that row's covariates.  Steps are independent (every window is
    specified from scratch), so per-step failures only mark that step
    missing; a spread whose missing count exceeds the threshold is
    marked unavailable as a whole.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < window + horizon:
        raise SpreadfitError(
            f"need {window + horizon} rows for window {window} + horizon {horizon}, have {n}"
        )
    config = config or FitConfig()
    forecasts = []
    for i in range(horizon):
        rows = slice(i, i + window)
        target_row = i + window
        step = _one_step(family, y[rows], X, rows, target_row, config, extract_grids)
        step.step = i
        forecasts.append(step)
    n_missing = sum(f.missing for f in forecasts)
    unavailable = n_missing > min(max_missing, horizon - 1)
    return RollingResult(
        family=family,
        forecasts=forecasts,
        unavailable=unavailable,
        window=window,
        horizon=horizon,
    )


def _one_step(family, y_win, X, rows, target_row, config, extract_grids) -> StepForecast:
    try:
        sub = DesignMatrix(X.values[rows], X.columns)
        model = specify(family, y_win, sub, config=config)
        row = {name: X.values[target_row, X.columns.index(name)] for name in X.covariate_names}
        params = predict_params(model, row)
        expected = expected_value(family, params)
        tier = TIER_FAILED
        if extract_grids:
            tier = extract_quantiles(family, params).tier
        return StepForecast(step=-1, params=params, expected=expected, tier=tier, missing=False)
    except (NonConvergence, SingularDesign, SpreadfitError):
        return StepForecast(step=-1, params=None, expected=np.nan, tier=TIER_FAILED, missing=True)


def grid_for_step(result_family: Family, step: StepForecast) -> QuantileGrid:
    """Re-extract the quantile grid for a stored step forecast."""
    if step.missing or step.params is None:
        return QuantileGrid(levels=np.empty(0, dtype=int), values=np.empty(0), tier=TIER_FAILED)
    return extract_quantiles(result_family, step.params)
