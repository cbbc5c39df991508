"""Fitting engine: closed-form anchors, recovery, and bookkeeping."""

import numpy as np
import pytest

import spreadfit.dists as D
from spreadfit.dists import Family, ParamVector
from spreadfit.errors import MissingCovariate, NonConvergence, SingularDesign
from spreadfit.gamlss import (
    DesignMatrix,
    FitConfig,
    fit,
    intercept_only_fit,
    loglik_from_params,
    predict_params,
    predict_params_matrix,
)


def test_normal_intercept_only_matches_closed_form():
    rng = np.random.default_rng(0)
    y = rng.normal(3.0, 2.0, size=500)
    m = intercept_only_fit(Family.NORMAL, y)
    assert m.converged
    assert m.coef[1][0] == pytest.approx(y.mean(), abs=1e-8)
    # ml scale estimate divides by T, not T-1
    assert np.exp(m.coef[2][0]) == pytest.approx(y.std(ddof=0), abs=1e-8)


def test_normal_regression_recovers_slope():
    rng = np.random.default_rng(1)
    x1 = rng.normal(size=2000)
    y = 2.0 + 3.0 * x1 + rng.normal(size=2000)
    X = DesignMatrix.from_covariates(x1[:, None], ["x1"])
    m = fit(Family.NORMAL, y, X, active={1: ["x1"], 2: []})
    assert abs(m.coef[1][0] - 2.0) < 3 * m.se[1][0]
    assert abs(m.coef[1][1] - 3.0) < 3 * m.se[1][1]


def test_st2_intercept_only_recovers_constants():
    truth = ParamVector(1.0, 2.0, 1.5, 8.0)
    y = D.sample(Family.ST2, truth, seed=5, size=2000)
    m = intercept_only_fit(Family.ST2, y)
    assert m.converged
    est = [m.coef[k][0] for k in (1, 2, 3, 4)]
    target = [1.0, np.log(2.0), 1.5, np.log(8.0)]
    for e, t, s in zip(est, target, [m.se[k][0] for k in (1, 2, 3, 4)]):
        assert abs(e - t) < 3 * s


def test_loglik_path_is_monotone():
    rng = np.random.default_rng(2)
    xs = rng.normal(size=(800, 2))
    mu = 0.5 + 0.6 * xs[:, 0]
    sigma = np.exp(0.2 + 0.3 * xs[:, 1])
    y = D.sample_conditional(Family.JSU, mu, sigma, np.full(800, -0.4), np.full(800, 1.0), rng)
    X = DesignMatrix.from_covariates(xs, ["x1", "x2"])
    m = fit(Family.JSU, y, X, active={1: ["x1"], 2: ["x2"], 3: [], 4: []})
    assert np.all(np.diff(np.array(m.loglik_path)) >= 0)


def test_fit_is_deterministic():
    rng = np.random.default_rng(3)
    y = rng.normal(size=300)
    a = intercept_only_fit(Family.SEP2, y)
    b = intercept_only_fit(Family.SEP2, y)
    for k in a.coef:
        assert np.array_equal(a.coef[k], b.coef[k])
    assert a.loglik == b.loglik


def test_fit_invariant_to_row_order():
    rng = np.random.default_rng(4)
    xs = rng.normal(size=(600, 1))
    y = 1.0 + 2.0 * xs[:, 0] + rng.normal(size=600)
    X = DesignMatrix.from_covariates(xs, ["x1"])
    m1 = fit(Family.NORMAL, y, X, active={1: ["x1"], 2: []})
    perm = rng.permutation(600)
    X2 = DesignMatrix.from_covariates(xs[perm], ["x1"])
    m2 = fit(Family.NORMAL, y[perm], X2, active={1: ["x1"], 2: []})
    for k in m1.coef:
        assert np.allclose(m1.coef[k], m2.coef[k], atol=1e-10)


def test_aic_bookkeeping():
    rng = np.random.default_rng(5)
    y = rng.normal(size=200)
    m = intercept_only_fit(Family.NORMAL, y)
    assert m.aic == pytest.approx(-2.0 * m.loglik + 2.0 * m.n_coef, abs=1e-12)


def test_stored_loglik_matches_predicted_parameters():
    rng = np.random.default_rng(6)
    xs = rng.normal(size=(400, 2))
    y = 0.3 + 0.9 * xs[:, 0] + np.exp(0.1) * rng.normal(size=400)
    X = DesignMatrix.from_covariates(xs, ["x1", "x2"])
    m = fit(Family.NORMAL, y, X, active={1: ["x1"], 2: ["x2"]})
    params = predict_params_matrix(m, X)
    assert loglik_from_params(m, y, params) == pytest.approx(m.loglik, abs=1e-8)


def test_degenerate_response_raises_nonconvergence():
    y = np.full(200, 4.2)
    with pytest.raises(NonConvergence):
        intercept_only_fit(Family.NORMAL, y)


def test_intercept_only_needs_thirty_rows():
    with pytest.raises(NonConvergence):
        intercept_only_fit(Family.NORMAL, np.random.default_rng(0).normal(size=10))


def test_singular_design_detected():
    rng = np.random.default_rng(7)
    x = rng.normal(size=300)
    xs = np.column_stack([x, 2.0 * x])
    y = x + rng.normal(size=300)
    X = DesignMatrix.from_covariates(xs, ["x1", "x2"])
    with pytest.raises(SingularDesign):
        fit(Family.NORMAL, y, X, active={1: ["x1", "x2"], 2: []})


def test_constant_plus_tiny_noise_recovers_constant():
    rng = np.random.default_rng(8)
    y = 7.0 + 1e-3 * rng.normal(size=400)
    m = intercept_only_fit(Family.NORMAL, y)
    assert abs(m.coef[1][0] - 7.0) < 1e-3


class TestPredictParams:
    def _model(self):
        rng = np.random.default_rng(9)
        xs = rng.normal(size=(500, 2))
        y = 1.0 + 0.5 * xs[:, 0] + np.exp(0.2) * rng.normal(size=500)
        X = DesignMatrix.from_covariates(xs, ["x1", "x2"])
        return fit(Family.NORMAL, y, X, active={1: ["x1"], 2: ["x2"]}), X

    def test_zero_covariates_give_inverse_linked_intercepts(self):
        m, _ = self._model()
        p = predict_params(m, {"x1": 0.0, "x2": 0.0})
        assert p.mu == pytest.approx(m.coef[1][0])
        assert p.sigma == pytest.approx(float(np.exp(m.coef[2][0])))

    def test_log_link_intercept_scaling(self):
        m, _ = self._model()
        base = predict_params(m, {"x1": 0.0, "x2": 0.0})
        m.coef[2][0] *= 2.0
        doubled = predict_params(m, {"x1": 0.0, "x2": 0.0})
        m.coef[2][0] /= 2.0
        assert doubled.sigma == pytest.approx(base.sigma * np.exp(m.coef[2][0]))

    def test_training_row_matches_in_sample_path(self):
        m, X = self._model()
        paths = predict_params_matrix(m, X)
        row = {"x1": X.values[17, 1], "x2": X.values[17, 2]}
        p = predict_params(m, row)
        assert p.mu == pytest.approx(paths[1][17], rel=1e-12)
        assert p.sigma == pytest.approx(paths[2][17], rel=1e-12)

    def test_missing_covariate(self):
        m, _ = self._model()
        with pytest.raises(MissingCovariate):
            predict_params(m, {"x1": 0.0})

    def test_positive_scale_by_construction(self):
        m, _ = self._model()
        p = predict_params(m, {"x1": -50.0, "x2": -50.0})
        assert p.sigma > 0


def test_config_validation():
    from spreadfit.errors import DomainError

    with pytest.raises(DomainError):
        FitConfig(alpha=1.5)
