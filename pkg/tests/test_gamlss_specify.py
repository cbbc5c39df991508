"""Wald tests and backward elimination."""

import numpy as np
import pytest
from scipy import stats

from spreadfit.dists import Family
from spreadfit.gamlss import DesignMatrix, FittedModel, specify, wald_pvalues
from spreadfit.gamlss.model import links_for


def _toy_model(coef, se):
    return FittedModel(
        family=Family.NORMAL,
        active={1: ["x1"], 2: []},
        coef={1: np.array([0.0, coef]), 2: np.array([0.0])},
        se={1: np.array([1.0, se]), 2: np.array([1.0])},
        links=links_for(Family.NORMAL),
        loglik=0.0,
        aic=0.0,
        converged=True,
        n_obs=100,
    )


def test_wald_zero_coefficient_has_unit_pvalue():
    pv = wald_pvalues(_toy_model(0.0, 1.0))
    assert pv[(1, "x1")] == pytest.approx(1.0)


def test_wald_critical_value():
    pv = wald_pvalues(_toy_model(1.96, 1.0))
    assert pv[(1, "x1")] == pytest.approx(0.05, abs=1e-3)


def test_noise_pvalues_are_uniform():
    rng = np.random.default_rng(77)
    pvals = []
    for _ in range(120):
        x = rng.normal(size=(400, 1))
        y = rng.normal(size=400)
        X = DesignMatrix.from_covariates(x, ["x1"])
        from spreadfit.gamlss import fit

        m = fit(Family.NORMAL, y, X, active={1: ["x1"], 2: []})
        pvals.append(wald_pvalues(m)[(1, "x1")])
    ks = stats.kstest(pvals, "uniform")
    assert ks.statistic < 0.12


def test_strong_covariate_survives_noise_removed():
    rng = np.random.default_rng(5)
    T = 1000
    xs = rng.normal(size=(T, 3))
    y = 1.0 + (10.0 / np.sqrt(T)) * 10.0 * xs[:, 0] + rng.normal(size=T)
    X = DesignMatrix.from_covariates(xs, ["x1", "x2", "x3"])
    m = specify(Family.NORMAL, y, X)
    assert "x1" in m.active[1]
    pv = wald_pvalues(m)
    non_intercept = [p for (k, name), p in pv.items() if name != "const"]
    assert all(p <= 0.05 for p in non_intercept)


def test_each_trace_step_removes_exactly_one():
    rng = np.random.default_rng(6)
    xs = rng.normal(size=(600, 4))
    y = rng.normal(size=600)
    X = DesignMatrix.from_covariates(xs, ["x1", "x2", "x3", "x4"])
    m = specify(Family.NORMAL, y, X)
    started = 4 * 2
    remaining = sum(len(v) for v in m.active.values())
    assert len(m.trace) == started - remaining
    assert len(m.trace) <= 4 * 4


def test_zero_covariates_returns_intercept_only():
    rng = np.random.default_rng(7)
    y = rng.normal(size=300)
    X = DesignMatrix.intercept_only(300)
    m = specify(Family.NORMAL, y, X)
    assert m.trace == []
    assert all(cols == [] for cols in m.active.values())


def test_all_noise_usually_ends_intercept_only():
    rng = np.random.default_rng(8)
    intercept_only = 0
    runs = 30
    for _ in range(runs):
        xs = rng.normal(size=(500, 2))
        y = rng.normal(size=500)
        X = DesignMatrix.from_covariates(xs, ["x1", "x2"])
        m = specify(Family.NORMAL, y, X)
        intercept_only += all(cols == [] for cols in m.active.values())
    # four noise slots at the 5% level keep ~81% of runs fully empty
    assert intercept_only >= runs * 0.6
