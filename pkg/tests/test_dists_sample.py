"""Sampling: determinism, distributional agreement, moment agreement."""

import math

import numpy as np
import pytest

import spreadfit.dists as D
from spreadfit.dists import Family, ParamVector


def empirical_ks(family, p, draws):
    xs = np.sort(draws)
    theo = D.cdf_values(family, p, xs)
    n = len(xs)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return max(np.max(np.abs(hi - theo)), np.max(np.abs(lo - theo)))


def test_fixed_seed_reproduces_draw():
    p = ParamVector(0.0, 1.0, 1.0, 4.0)
    assert D.sample(Family.ST2, p, seed=42) == D.sample(Family.ST2, p, seed=42)


def test_tight_normal_draws_stay_within_ten_sigma():
    p = ParamVector(5.0, 0.001)
    draws = D.sample(Family.NORMAL, p, seed=1, size=2000)
    assert np.all(draws > 4.99) and np.all(draws < 5.01)


@pytest.mark.parametrize(
    "family,p",
    [
        (Family.NORMAL, ParamVector(0.0, 1.0)),
        (Family.JSU, ParamVector(0.0, 1.0, -0.4, 2.0)),
        (Family.JSUO, ParamVector(0.0, 1.0, 0.6, 1.2)),
        (Family.SEP1, ParamVector(0.0, 1.0, -1.0, 1.5)),
        (Family.SEP2, ParamVector(0.0, 1.0, 0.5, 2.0)),
        (Family.ST1, ParamVector(0.0, 1.0, 1.5, 6.0)),
        (Family.ST2, ParamVector(0.0, 1.0, 2.0, 10.0)),
        (Family.ST5, ParamVector(0.0, 1.0, 0.8, 0.9)),
    ],
)
def test_inverse_cdf_sampling_matches_cdf(family, p):
    draws = D.sample(family, p, seed=7, size=100_000)
    crit_99 = 1.628 / math.sqrt(len(draws))
    assert empirical_ks(family, p, draws) < crit_99


def test_st2_monte_carlo_mean_matches_expected_value():
    p = ParamVector(0.0, 1.0, 2.0, 10.0)
    draws = D.sample(Family.ST2, p, seed=99, size=100_000)
    se = draws.std(ddof=1) / math.sqrt(len(draws))
    assert abs(draws.mean() - D.expected_value(Family.ST2, p)) < 3 * se


def test_conditional_sampler_matches_cdf():
    rng = np.random.default_rng(5)
    n = 50_000
    for family, nu, tau in [
        (Family.SEP1, -1.2, 1.4),
        (Family.SEP2, 0.8, 2.5),
        (Family.ST1, 1.5, 6.0),
        (Family.ST2, -0.7, 4.0),
        (Family.ST5, 0.6, 0.8),
    ]:
        p = ParamVector(0.0, 1.0, nu, tau)
        z = D.sample_conditional(
            family, np.zeros(n), np.ones(n), np.full(n, nu), np.full(n, tau), rng
        )
        assert empirical_ks(family, p, z) < 1.628 / math.sqrt(n)
