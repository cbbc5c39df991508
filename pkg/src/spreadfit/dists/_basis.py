"""Base densities shared by the skew families.

Two symmetric bases appear inside the skew constructions: a power
exponential with scale tau**(1/tau) (so that |z/s|**tau = |z|**tau / tau)
and a Student t with fractional degrees of freedom.  Everything here is
vectorized over numpy arrays and numerically safe in the far tails.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sc

_LOG2 = np.log(2.0)
_LOG_SQRT_PI = 0.5 * np.log(np.pi)


def _log_upper_gamma_q(a, x):
    """log of the regularized upper incomplete gamma Q(a, x).

    Uses scipy where Q does not underflow and a first-order asymptotic
    expansion Q(a,x) ~ x**(a-1) e**-x / Gamma(a) for very large x.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    q = sc.gammaincc(a, x)
    with np.errstate(divide="ignore"):
        out = np.log(q)
    tiny = (q <= 0.0) & (x > 0.0)
    if np.any(tiny):
        xa = np.broadcast_to(a, out.shape)[tiny]
        xx = np.broadcast_to(x, out.shape)[tiny]
        out = np.array(out, copy=True)
        out[tiny] = (xa - 1.0) * np.log(xx) - xx - sc.gammaln(xa) + np.log1p(
            np.maximum(xa - 1.0, 0.0) / xx
        )
    return out


def _log_t_sf(df, x):
    """log of the Student t survival function, safe for huge |x|."""
    df = np.asarray(df, dtype=float)
    x = np.asarray(x, dtype=float)
    p = sc.stdtr(df, -x)
    with np.errstate(divide="ignore"):
        out = np.log(p)
    tiny = (p <= 0.0) & (x > 0.0)
    if np.any(tiny):
        d = np.broadcast_to(df, out.shape)[tiny]
        xx = np.broadcast_to(x, out.shape)[tiny]
        out = np.array(out, copy=True)
        # leading term of the power tail: pdf(x) * x / d for large x
        logc = sc.gammaln((d + 1.0) / 2.0) - sc.gammaln(d / 2.0) - 0.5 * np.log(d * np.pi)
        out[tiny] = logc + 0.5 * (d + 1.0) * np.log(d) - d * np.log(xx) - np.log(d)
    return out


class PowerExpBase:
    """Power exponential with density ~ exp(-|z|**tau / tau)."""

    @staticmethod
    def logpdf(z, tau):
        z = np.asarray(z, dtype=float)
        tau = np.asarray(tau, dtype=float)
        with np.errstate(over="ignore"):
            g = np.abs(z) ** tau / tau
        return (1.0 - 1.0 / tau) * np.log(tau) - _LOG2 - sc.gammaln(1.0 / tau) - g

    @staticmethod
    def cdf(z, tau):
        z = np.asarray(z, dtype=float)
        tau = np.asarray(tau, dtype=float)
        with np.errstate(over="ignore"):
            g = np.abs(z) ** tau / tau
        a = 1.0 / tau
        pos = 0.5 + 0.5 * sc.gammainc(a, g)
        neg = 0.5 * sc.gammaincc(a, g)
        return np.where(z >= 0, pos, neg)

    @staticmethod
    def logcdf(z, tau):
        z = np.asarray(z, dtype=float)
        tau = np.asarray(tau, dtype=float)
        with np.errstate(over="ignore"):
            g = np.abs(z) ** tau / tau
        a = 1.0 / tau
        pos = np.log1p(sc.gammainc(a, g)) - _LOG2
        neg = _log_upper_gamma_q(a, g) - _LOG2
        return np.where(z >= 0, pos, neg)

    @staticmethod
    def ppf(v, tau):
        v = np.asarray(v, dtype=float)
        tau = np.asarray(tau, dtype=float)
        a = 1.0 / tau
        upper = v > 0.5
        # work with the nearer tail to keep precision at both ends
        p_tail = np.where(upper, 2.0 * (1.0 - v), 2.0 * v)
        p_tail = np.clip(p_tail, 0.0, 1.0)
        with np.errstate(over="ignore", invalid="ignore"):
            g = sc.gammainccinv(a, p_tail)
            mag = (tau * g) ** (1.0 / tau)
        return np.where(upper, mag, -mag)


class StudentTBase:
    """Student t with (possibly fractional) degrees of freedom."""

    @staticmethod
    def logpdf(z, df):
        z = np.asarray(z, dtype=float)
        df = np.asarray(df, dtype=float)
        return (
            sc.gammaln((df + 1.0) / 2.0)
            - sc.gammaln(df / 2.0)
            - 0.5 * np.log(df)
            - _LOG_SQRT_PI
            - 0.5 * (df + 1.0) * np.log1p(z * z / df)
        )

    @staticmethod
    def cdf(z, df):
        z = np.asarray(z, dtype=float)
        df = np.asarray(df, dtype=float)
        return sc.stdtr(df, z)

    @staticmethod
    def logcdf(z, df):
        return _log_t_sf(df, -np.asarray(z, dtype=float))

    @staticmethod
    def ppf(v, df):
        v = np.asarray(v, dtype=float)
        df = np.asarray(df, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return sc.stdtrit(df, v)
