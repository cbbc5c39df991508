"""Expected-value closed forms, their guards and the shape solver."""

import math

import numpy as np
import pytest
from scipy import integrate

import spreadfit.dists as D
from spreadfit.dists import Family, ParamVector
from spreadfit.dists.families import st5_shape_closed


def mean_by_quadrature(family, p):
    f = lambda y: y * D.pdf(family, p, y)
    left, _ = integrate.quad(f, -np.inf, p.mu, limit=400)
    right, _ = integrate.quad(f, p.mu, np.inf, limit=400)
    return left + right


def test_jsu_mean_is_mu():
    p = ParamVector(3.2, 1.0, -0.4, 2.0)
    assert D.expected_value(Family.JSU, p) == 3.2


def test_st2_mean_zero_when_symmetric():
    p = ParamVector(0.0, 1.0, 0.0, 5.0)
    assert D.expected_value(Family.ST2, p) == 0.0


def test_sep2_mean_matches_quadrature_oracle():
    # frozen: 1 + 2 * quad(z * f_Z(z)) = 1.713649646461106
    p = ParamVector(1.0, 2.0, 0.5, 2.0)
    assert D.expected_value(Family.SEP2, p) == pytest.approx(1.713649646461106, abs=1e-2)


@pytest.mark.parametrize(
    "family,nu,tau",
    [
        (Family.SEP1, -2.0, 0.8),
        (Family.SEP1, 2.0, 10.0),
        (Family.SEP2, -0.5, 0.8),
        (Family.SEP2, 2.0, 2.0),
        (Family.ST2, 1.5, 2.0),
        (Family.ST2, -0.5, 10.0),
        (Family.ST5, 0.8, 0.8),
        (Family.ST5, -0.3, 1.2),
        (Family.JSUO, 0.6, 1.5),
    ],
)
def test_closed_forms_agree_with_quadrature(family, nu, tau):
    p = ParamVector(1.0, 2.0, nu, tau)
    got = D.expected_value(family, p)
    ref = mean_by_quadrature(family, p)
    tol = 1e-2 if family is Family.SEP2 else 1e-3
    assert got == pytest.approx(ref, rel=tol)


@pytest.mark.parametrize("family", [Family.SEP1, Family.SEP2, Family.ST2, Family.ST5])
def test_zero_skew_gives_mu_exactly(family):
    p = ParamVector(7.7, 3.0, 0.0, 4.0)
    assert abs(D.expected_value(family, p) - 7.7) < 1e-8


@pytest.mark.parametrize("family", list(Family))
def test_tau_cap_idempotent(family):
    hi = ParamVector(1.0, 2.0, 1.5, 250.0)
    capped = ParamVector(1.0, 2.0, 1.5, 100.0)
    assert D.expected_value(family, hi) == D.expected_value(family, capped)


def test_st2_guard_near_unit_tau():
    assert D.expected_value(Family.ST2, ParamVector(2.0, 1.0, 1.0, 1.04)) == 2.0
    assert D.expected_value(Family.ST2, ParamVector(2.0, 1.0, 1.0, 1.06)) != 2.0


def test_st5_guard_small_shapes():
    # tau=10 puts both shapes near 0.1, far below the gamma-argument guard
    assert D.expected_value(Family.ST5, ParamVector(5.0, 1.0, 1.0, 10.0)) == 5.0


def test_normal_mean():
    assert D.expected_value(Family.NORMAL, ParamVector(-3.5, 2.0)) == -3.5


class TestShapeSolver:
    def test_symmetric_tau_one(self):
        s = D.st5_shape_from_nu_tau(0.0, 1.0)
        assert s.converged
        assert s.a == pytest.approx(1.0, abs=1e-12)
        assert s.b == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_tau_half(self):
        s = D.st5_shape_from_nu_tau(0.0, 0.5)
        assert s.a == pytest.approx(2.0, abs=1e-12)
        assert s.b == pytest.approx(2.0, abs=1e-12)

    def test_bisection_oracle_value(self):
        # frozen: bracketed bisection over (0, 2/tau), residual < 4e-15
        s = D.st5_shape_from_nu_tau(1.5, 0.8)
        assert s.a == pytest.approx(2.205588483945547, abs=1e-9)
        assert s.b == pytest.approx(0.2944115160544531, abs=1e-9)

    def test_residuals_on_random_draws(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            nu = rng.normal(0.0, 2.5)
            tau = float(np.exp(rng.uniform(np.log(0.05), np.log(100.0))))
            s = D.st5_shape_from_nu_tau(nu, tau)
            assert s.converged
            assert abs(s.a + s.b - 2.0 / tau) < 1e-8
            assert abs(nu - (s.a - s.b) / math.sqrt(s.a * s.b * (s.a + s.b))) < 1e-8

    def test_agrees_with_closed_form(self):
        a, b = st5_shape_closed(-0.9, 2.2)
        s = D.st5_shape_from_nu_tau(-0.9, 2.2)
        assert s.a == pytest.approx(float(a), rel=1e-10)
        assert s.b == pytest.approx(float(b), rel=1e-10)

    def test_no_root_flagged_not_raised(self):
        s = D.st5_shape_from_nu_tau(1e9, 1.0)
        assert not s.converged
        assert s.b == 0.0
