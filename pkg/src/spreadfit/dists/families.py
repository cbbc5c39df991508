"""Standardized density kernels for the eight families.

All functions work on the standardized residual z = (y - mu) / sigma and
broadcast over numpy arrays.  Log-densities of y are obtained by
subtracting log(sigma).

Four families (normal, both Johnson forms, the two-shape skew-t) have
closed-form distribution and quantile functions.  The remaining four are
"skew products" 2 * f_base(z) * G(z) whose distribution functions are
integrated numerically by the engine module.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sc

from ..errors import DomainError
from ._basis import PowerExpBase, StudentTBase
from .params import Family

_LOG2 = np.log(2.0)
_LOG_2PI = np.log(2.0 * np.pi)


def st5_shape_closed(nu, tau):
    """Closed-form shape pair (a, b) of the two-shape skew-t.

    Solves a + b = 2/tau and nu = (a - b) / sqrt(a*b*(a+b)) exactly.
    """
    nu = np.asarray(nu, dtype=float)
    tau = np.asarray(tau, dtype=float)
    d = nu / np.sqrt(2.0 * tau + nu * nu)
    a = (1.0 + d) / tau
    b = (1.0 - d) / tau
    return a, b


# ---------------------------------------------------------------------------
# closed-form families
# ---------------------------------------------------------------------------


def _normal_logpdf(z, nu, tau):
    return -0.5 * z * z - 0.5 * _LOG_2PI


def _normal_cdf(z, nu, tau):
    return sc.ndtr(z)


def _normal_ppf(v, nu, tau):
    return sc.ndtri(v)


def _jsu_parts(nu, tau):
    rtau = 1.0 / tau
    w = np.exp(np.minimum(rtau * rtau, 700.0))
    omega = -nu * rtau
    c = (0.5 * (w - 1.0) * (w * np.cosh(2.0 * omega) + 1.0)) ** (-0.5)
    shift = c * np.sqrt(w) * np.sinh(omega)
    return rtau, c, shift


def _jsu_logpdf(z, nu, tau):
    rtau, c, shift = _jsu_parts(nu, tau)
    zi = (z - shift) / c
    r = -nu + np.arcsinh(zi) / rtau
    return -np.log(c) - np.log(rtau) - 0.5 * np.log(zi * zi + 1.0) - 0.5 * _LOG_2PI - 0.5 * r * r


def _jsu_cdf(z, nu, tau):
    rtau, c, shift = _jsu_parts(nu, tau)
    zi = (z - shift) / c
    return sc.ndtr(-np.asarray(nu, dtype=float) + np.arcsinh(zi) / rtau)


def _jsu_ppf(v, nu, tau):
    rtau, c, shift = _jsu_parts(nu, tau)
    zi = np.sinh(rtau * (sc.ndtri(v) + nu))
    return shift + c * zi


def _jsuo_logpdf(z, nu, tau):
    r = nu + tau * np.arcsinh(z)
    return np.log(tau) - 0.5 * np.log(z * z + 1.0) - 0.5 * _LOG_2PI - 0.5 * r * r


def _jsuo_cdf(z, nu, tau):
    return sc.ndtr(nu + tau * np.arcsinh(z))


def _jsuo_ppf(v, nu, tau):
    return np.sinh((sc.ndtri(v) - nu) / tau)


def _st5_logpdf(z, nu, tau):
    a, b = st5_shape_closed(nu, tau)
    z = np.asarray(z, dtype=float)
    ab = a + b
    s = np.sqrt(ab + z * z)
    # st +- |z| computed without cancellation
    big = s + np.abs(z)
    small = ab / big
    logp = np.log(big) - np.log(s)
    logm = np.log(small) - np.log(s)
    lo1 = np.where(z >= 0, logp, logm)  # log(1 + z/s)
    lo2 = np.where(z >= 0, logm, logp)  # log(1 - z/s)
    logc = -((ab - 1.0) * _LOG2 + 0.5 * np.log(ab) + sc.betaln(a, b))
    return logc + (a + 0.5) * lo1 + (b + 0.5) * lo2


def _st5_cdf(z, nu, tau):
    a, b = st5_shape_closed(nu, tau)
    z = np.asarray(z, dtype=float)
    ab = a + b
    s = np.sqrt(ab + z * z)
    half_small = 0.5 * ab / (s * (s + np.abs(z)))
    # u = (1 + z/s)/2 with the small side evaluated stably
    return np.where(
        z >= 0,
        1.0 - sc.betainc(b, a, half_small),
        sc.betainc(a, b, half_small),
    )


def _st5_ppf(v, nu, tau):
    a, b = st5_shape_closed(nu, tau)
    v = np.asarray(v, dtype=float)
    # invert in the nearer tail so u keeps full precision at both ends
    with np.errstate(divide="ignore", invalid="ignore"):
        u_lo = sc.betaincinv(a, b, np.minimum(v, 0.5))
        u_hi = sc.betaincinv(b, a, np.minimum(1.0 - v, 0.5))
        upper = v > 0.5
        u_small = np.where(upper, u_hi, u_lo)
        s = np.where(upper, 1.0 - 2.0 * u_hi, 2.0 * u_lo - 1.0)
        denom = 4.0 * u_small * (1.0 - u_small)
        out = s * np.sqrt((a + b) / denom)
    return out


# ---------------------------------------------------------------------------
# skew-product families: 2 * f_base(z) * G(z)
# ---------------------------------------------------------------------------


def _sep1_logpdf(z, nu, tau):
    return _LOG2 + PowerExpBase.logpdf(z, tau) + PowerExpBase.logcdf(nu * np.asarray(z, dtype=float), tau)


def _sep1_skew(z, nu, tau):
    return PowerExpBase.cdf(nu * np.asarray(z, dtype=float), tau)


def _sep2_omega(z, nu, tau):
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore"):
        return np.sign(z) * np.abs(z) ** (tau / 2.0) * nu * np.sqrt(2.0 / tau)


def _sep2_logpdf(z, nu, tau):
    return _LOG2 + PowerExpBase.logpdf(z, tau) + sc.log_ndtr(_sep2_omega(z, nu, tau))


def _sep2_skew(z, nu, tau):
    return sc.ndtr(_sep2_omega(z, nu, tau))


def _st1_logpdf(z, nu, tau):
    z = np.asarray(z, dtype=float)
    return _LOG2 + StudentTBase.logpdf(z, tau) + StudentTBase.logcdf(nu * z, tau)


def _st1_skew(z, nu, tau):
    return StudentTBase.cdf(nu * np.asarray(z, dtype=float), tau)


def _st2_arg(z, nu, tau):
    z = np.asarray(z, dtype=float)
    lam = (tau + 1.0) / (tau + z * z)
    return nu * np.sqrt(lam) * z


def _st2_logpdf(z, nu, tau):
    z = np.asarray(z, dtype=float)
    return _LOG2 + StudentTBase.logpdf(z, tau) + StudentTBase.logcdf(_st2_arg(z, nu, tau), tau + 1.0)


def _st2_skew(z, nu, tau):
    return StudentTBase.cdf(_st2_arg(z, nu, tau), tau + 1.0)


_LOGPDF = {
    Family.NORMAL: _normal_logpdf,
    Family.JSU: _jsu_logpdf,
    Family.JSUO: _jsuo_logpdf,
    Family.SEP1: _sep1_logpdf,
    Family.SEP2: _sep2_logpdf,
    Family.ST1: _st1_logpdf,
    Family.ST2: _st2_logpdf,
    Family.ST5: _st5_logpdf,
}

# closed-form standardized cdf / ppf where they exist
CLOSED_CDF = {
    Family.NORMAL: _normal_cdf,
    Family.JSU: _jsu_cdf,
    Family.JSUO: _jsuo_cdf,
    Family.ST5: _st5_cdf,
}
CLOSED_PPF = {
    Family.NORMAL: _normal_ppf,
    Family.JSU: _jsu_ppf,
    Family.JSUO: _jsuo_ppf,
    Family.ST5: _st5_ppf,
}

# numeric families: (base, skew factor G)
SKEW_PRODUCT = {
    Family.SEP1: (PowerExpBase, _sep1_skew),
    Family.SEP2: (PowerExpBase, _sep2_skew),
    Family.ST1: (StudentTBase, _st1_skew),
    Family.ST2: (StudentTBase, _st2_skew),
}


def logpdf_z(family: Family, z, nu, tau):
    """Standardized log-density log f_Z(z | nu, tau)."""
    return _LOGPDF[family](z, nu, tau)


def logpdf_arrays(family: Family, y, mu, sigma, nu, tau):
    """Vectorized log f_Y(y | mu, sigma, nu, tau).

    Invalid sigma/tau entries yield NaN; zero density yields -inf.
    """
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    with np.errstate(all="ignore"):
        z = (y - mu) / sigma
        out = logpdf_z(family, z, nu, tau) - np.log(sigma)
        bad = (np.asarray(sigma) <= 0) | (np.asarray(tau) <= 0)
        if np.any(bad):
            out = np.where(bad, np.nan, out)
    return out


def require_family(family) -> Family:
    if isinstance(family, Family):
        return family
    if isinstance(family, str):
        return Family.from_string(family)
    raise DomainError(f"not a family tag: {family!r}")
