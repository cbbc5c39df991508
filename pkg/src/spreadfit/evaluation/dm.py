"""Loss-differential significance test with the small-sample correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from ..errors import DegenerateVariance, DomainError


@dataclass(frozen=True)
class DMResult:
    statistic: float
    pvalue: float
    horizon: int


def dm_test(scores1, scores2) -> DMResult:
    """One-sided comparison of two per-step loss series.

    The differential is |s1| - |s2| per step over pairwise-complete
    entries; the statistic uses the lag-0 long-run variance (one-step
    forecasts), the small-sample scale factor sqrt((n+1-2h+h(h-1)/n)/n)
    with h=1, and Student t reference with n-1 degrees of freedom.  Small
    p-values mean the first series forecasts better.
    """
    s1 = np.asarray(scores1, dtype=float)
    s2 = np.asarray(scores2, dtype=float)
    if s1.shape != s2.shape:
        raise DomainError("score series must have equal length")
    mask = np.isfinite(s1) & np.isfinite(s2)
    d = np.abs(s1[mask]) - np.abs(s2[mask])
    n = int(d.size)
    if n < 10:
        raise DomainError(f"need at least 10 complete steps, got {n}")
    dbar = float(np.mean(d))
    gamma0 = float(np.mean((d - dbar) ** 2))
    if gamma0 <= 0.0:
        if dbar == 0.0:
            # identical forecasters: the null exactly, by symmetry
            return DMResult(statistic=0.0, pvalue=0.5, horizon=n)
        raise DegenerateVariance("loss differential is constant and nonzero")
    stat = dbar / np.sqrt(gamma0 / n)
    h = 1
    correction = np.sqrt((n + 1 - 2 * h + h * (h - 1) / n) / n)
    stat = float(stat * correction)
    pvalue = float(sc.stdtr(n - 1, stat))
    return DMResult(statistic=stat, pvalue=pvalue, horizon=n)
