"""Rolling-window forecast runner."""

import numpy as np
import pytest

from spreadfit.dists import Family, expected_value
from spreadfit.errors import SpreadfitError
from spreadfit.evaluation import rolling_window_run
from spreadfit.gamlss import DesignMatrix, predict_params, specify


def _panel(n, seed=0, slope=2.0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 1))
    y = 1.0 + slope * x[:, 0] + rng.normal(size=n)
    return y, DesignMatrix.from_covariates(x, ["x1"])


def test_single_step_equals_direct_specify_fit_predict():
    y, X = _panel(181, seed=1)
    res = rolling_window_run(y, X, Family.NORMAL, window=180, horizon=1)
    step = res.forecasts[0]
    model = specify(Family.NORMAL, y[:180], DesignMatrix(X.values[:180], X.columns))
    direct = predict_params(model, {"x1": X.values[180, 1]})
    assert step.params.mu == direct.mu
    assert step.params.sigma == direct.sigma
    assert step.expected == expected_value(Family.NORMAL, direct)


def test_forecasts_track_constant_truth():
    y, X = _panel(260, seed=2, slope=0.0)
    res = rolling_window_run(y, X, Family.NORMAL, window=200, horizon=40)
    assert not res.unavailable
    ev = res.expected_series()
    assert np.isfinite(ev).all()
    # true unconditional mean is 1.0
    assert abs(np.nanmean(ev) - 1.0) < 3 * (1.0 / np.sqrt(200))


def test_engineered_failure_marks_unavailable():
    n = 140
    y = np.full(n, 3.0)  # zero variance in every window
    X = DesignMatrix.intercept_only(n)
    res = rolling_window_run(y, X, Family.NORMAL, window=120, horizon=20)
    assert res.unavailable
    assert res.n_missing == 20
    assert all(f.missing for f in res.forecasts)


def test_requires_enough_rows():
    y, X = _panel(100)
    with pytest.raises(SpreadfitError):
        rolling_window_run(y, X, Family.NORMAL, window=90, horizon=20)


def test_missing_threshold_respects_paper_constant():
    # horizons beyond 201 use the absolute 200-step rule
    y, X = _panel(120, seed=3)
    res = rolling_window_run(y, X, Family.NORMAL, window=60, horizon=30)
    assert res.unavailable is (res.n_missing > 29)
