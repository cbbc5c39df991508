"""Scalar public operations: pdf, cdf, quantile, log-likelihood, sampling."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError, EvalError, QuantileFailure
from . import engine
from .families import CLOSED_CDF, CLOSED_PPF, SKEW_PRODUCT, logpdf_z, require_family
from .params import Family, ParamVector


def _check_point(p: ParamVector, y: float) -> float:
    if not isinstance(p, ParamVector):
        raise DomainError(f"expected a ParamVector, got {type(p).__name__}")
    y = float(y)
    if not math.isfinite(y):
        raise DomainError(f"y must be finite, got {y}")
    return y


def log_likelihood(family, p: ParamVector, y: float) -> float:
    """log f_Y(y); -inf where the density underflows to zero."""
    family = require_family(family)
    y = _check_point(p, y)
    z = (y - p.mu) / p.sigma
    out = float(logpdf_z(family, z, p.nu, p.tau)) - math.log(p.sigma)
    if math.isnan(out):
        raise EvalError(
            f"density evaluation failed for {family.value} at y={y} "
            f"(mu={p.mu}, sigma={p.sigma}, nu={p.nu}, tau={p.tau})"
        )
    return out


def pdf(family, p: ParamVector, y: float) -> float:
    """Density f_Y(y | mu, sigma, nu, tau); 0.0 in underflowing tails."""
    return math.exp(log_likelihood(family, p, y))


def cdf(family, p: ParamVector, y: float) -> float:
    """P(Y <= y); closed form where available, else adaptive quadrature."""
    family = require_family(family)
    y = _check_point(p, y)
    z = (y - p.mu) / p.sigma
    closed = CLOSED_CDF.get(family)
    if closed is not None:
        out = float(closed(z, p.nu, p.tau))
        if math.isnan(out):
            raise EvalError(f"cdf evaluation failed for {family.value} at y={y}")
        return min(max(out, 0.0), 1.0)
    return engine.skew_cdf_scalar(family, p.nu, p.tau, z)


def quantile(family, p: ParamVector, level: float) -> float:
    """Inverse of cdf at the given level in (0, 1).

    Raises QuantileFailure (recoverable) when the root search cannot
    converge for these parameters.
    """
    family = require_family(family)
    if not isinstance(p, ParamVector):
        raise DomainError(f"expected a ParamVector, got {type(p).__name__}")
    level = float(level)
    if not 0.0 < level < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {level}")
    closed = CLOSED_PPF.get(family)
    if closed is not None:
        with np.errstate(all="ignore"):
            z = float(closed(level, p.nu, p.tau))
        if not math.isfinite(z):
            raise QuantileFailure(
                f"closed-form quantile degenerated for {family.value} at level {level}"
            )
        return p.mu + p.sigma * z
    z, ok = engine.skew_ppf_levels(family, p.nu, p.tau, [level])
    if not bool(ok[0]):
        raise QuantileFailure(
            f"quantile search failed for {family.value} at level {level} "
            f"(nu={p.nu}, tau={p.tau})"
        )
    return p.mu + p.sigma * float(z[0])


def cdf_values(family, p: ParamVector, y) -> np.ndarray:
    """Vectorized cdf over an array of points (same semantics as cdf)."""
    family = require_family(family)
    y = np.asarray(y, dtype=float)
    z = (y - p.mu) / p.sigma
    closed = CLOSED_CDF.get(family)
    if closed is not None:
        with np.errstate(all="ignore"):
            return np.clip(np.asarray(closed(z, p.nu, p.tau), dtype=float), 0.0, 1.0)
    base, _ = SKEW_PRODUCT[family]
    cmap = engine.cumulative_map(family, p.nu, p.tau)
    with np.errstate(all="ignore"):
        v = np.clip(np.asarray(base.cdf(z, p.tau), dtype=float), 0.0, 1.0)
    return np.clip(cmap.value(v), 0.0, 1.0)


def quantile_levels(family, p: ParamVector, levels) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized quantiles at several levels; returns (values, ok mask).

    Levels that fail carry NaN in the value array instead of raising,
    which is what the tiered fallback machinery needs.
    """
    family = require_family(family)
    lv = np.asarray(levels, dtype=float)
    closed = CLOSED_PPF.get(family)
    if closed is not None:
        with np.errstate(all="ignore"):
            z = np.asarray(closed(lv, p.nu, p.tau), dtype=float)
        ok = np.isfinite(z)
        return p.mu + p.sigma * np.where(ok, z, np.nan), ok
    try:
        z, ok = engine.skew_ppf_levels(family, p.nu, p.tau, lv)
    except QuantileFailure:
        return np.full(lv.shape, np.nan), np.zeros(lv.shape, dtype=bool)
    return p.mu + p.sigma * z, ok


def sample(family, p: ParamVector, seed, size: int | None = None):
    """Inverse-CDF sampling, deterministic for a fixed seed.

    Returns a scalar when size is None, else an array of draws.
    """
    family = require_family(family)
    rng = np.random.default_rng(seed)
    n = 1 if size is None else int(size)
    u = rng.uniform(size=n)
    values, ok = quantile_levels(family, p, u)
    if not np.all(ok):
        bad = u[~ok]
        raise QuantileFailure(
            f"inverse-cdf sampling failed for {family.value} at level {bad[0]:.6g}"
        )
    return float(values[0]) if size is None else values


def sample_conditional(family, mu, sigma, nu, tau, rng) -> np.ndarray:
    """Draws with row-varying parameters (plumbing for synthetic panels).

    Closed-form families invert the cdf directly; the skew products use
    the exact sign-flip selection construction for 2 f(z) G(w(z)).
    """
    family = require_family(family)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    nu = np.asarray(nu, dtype=float)
    tau = np.asarray(tau, dtype=float)
    n = np.broadcast_shapes(mu.shape, sigma.shape, nu.shape, tau.shape)
    closed = CLOSED_PPF.get(family)
    if closed is not None:
        u = rng.uniform(size=n)
        with np.errstate(all="ignore"):
            z = np.asarray(closed(u, nu, tau), dtype=float)
    else:
        base, skew_fn = SKEW_PRODUCT[family]
        u0 = rng.uniform(size=n)
        z0 = np.asarray(base.ppf(u0, tau), dtype=float)
        # G is itself a symmetric cdf evaluated at an odd transform of z;
        # comparing an independent G-draw against that transform and
        # flipping the sign on rejection reproduces 2 f(z) G(z) exactly
        u1 = rng.uniform(size=n)
        keep = u1 <= skew_fn(z0, nu, tau)
        z = np.where(keep, z0, -z0)
    if not np.all(np.isfinite(z)):
        raise EvalError(f"sampling degenerated for {family.value}")
    return mu + sigma * z
