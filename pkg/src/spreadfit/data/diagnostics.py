"""Stationarity and descriptive diagnostics for the spread panel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularDesign
from .spreads import SpreadPanel, all_spread_ids

# response-surface critical values, constant + linear trend case
_ADF_CT_1PCT = (-3.9638, -8.353, -47.44)


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    critical_1pct: float
    stationary_at_1pct: bool
    n_obs: int


def adf_test(series, lags: int = 10, trend: bool = True) -> AdfResult:
    """Augmented Dickey-Fuller regression with lagged differences.

    The default matches the panel diagnostic: 10 lags, constant and
    linear trend, compared to the 1% critical value.
    """
    y = np.asarray(series, dtype=float)
    n = y.shape[0]
    if n <= 12 + lags:
        raise SingularDesign(f"series too short for {lags} lags ({n} points)")
    dy = np.diff(y)
    rows = np.arange(lags, len(dy))
    target = dy[rows]
    cols = [np.ones(len(rows))]
    if trend:
        cols.append(rows.astype(float) + 1.0)
    cols.append(y[rows])
    for i in range(1, lags + 1):
        cols.append(dy[rows - i])
    X = np.column_stack(cols)
    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        raise SingularDesign("ADF regressors are collinear (constant series?)")
    beta, _, _, _ = np.linalg.lstsq(X, target, rcond=None)
    resid = target - X @ beta
    dof = len(rows) - X.shape[1]
    s2 = float(resid @ resid) / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    level_pos = 2 if trend else 1
    se = np.sqrt(s2 * xtx_inv[level_pos, level_pos])
    stat = float(beta[level_pos] / se)
    b0, b1, b2 = _ADF_CT_1PCT
    nobs = len(rows)
    crit = b0 + b1 / nobs + b2 / nobs**2
    return AdfResult(
        statistic=stat,
        critical_1pct=crit,
        stationary_at_1pct=stat < crit,
        n_obs=nobs,
    )


@dataclass
class DescriptiveStats:
    skewness: np.ndarray       # 24x24 upper triangle by (h1, h2)
    excess_kurtosis: np.ndarray
    price_covariance: np.ndarray
    price_correlation: np.ndarray


def _sample_skew(x: np.ndarray) -> float:
    d = x - x.mean()
    m2 = np.mean(d**2)
    if m2 == 0:
        return 0.0
    return float(np.mean(d**3) / m2**1.5)


def _sample_excess_kurtosis(x: np.ndarray) -> float:
    d = x - x.mean()
    m2 = np.mean(d**2)
    if m2 == 0:
        return 0.0
    return float(np.mean(d**4) / m2**2 - 3.0)


def descriptive_stats(spanel: SpreadPanel) -> DescriptiveStats:
    """Sample moment matrices used by the report stage."""
    skew = np.full((24, 24), np.nan)
    kurt = np.full((24, 24), np.nan)
    for sid in all_spread_ids():
        series = spanel.Y[:, sid.index - 1]
        skew[sid.h1, sid.h2] = _sample_skew(series)
        kurt[sid.h1, sid.h2] = _sample_excess_kurtosis(series)
    prices = spanel.panel.prices
    cov = np.cov(prices, rowvar=False)
    sd = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = cov / np.outer(sd, sd)
    return DescriptiveStats(
        skewness=skew,
        excess_kurtosis=kurt,
        price_covariance=cov,
        price_correlation=corr,
    )
