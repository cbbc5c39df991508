"""Quantile-grid extraction with tiered fallback and pinball scoring."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dists import ParamVector, quantile_levels
from ..errors import EmptyHorizon

TIER_FAILED = 0
_TIERS = (99, 97, 95)


@dataclass
class QuantileGrid:
    """Ordered quantile levels/values plus fallback provenance.

    tier is 99, 97 or 95 for the successful ladder rung, 0 when even the
    95-quantile set could not be extracted.
    """

    levels: np.ndarray
    values: np.ndarray
    tier: int

    @property
    def failed(self) -> bool:
        return self.tier == TIER_FAILED

    def value_at(self, level: int) -> float:
        idx = np.nonzero(self.levels == level)[0]
        if len(idx) == 0:
            return np.nan
        return float(self.values[idx[0]])


def extract_quantiles(family, p: ParamVector) -> QuantileGrid:
    """Percentile grid 1..99 with the tail-dropping fallback ladder.

    Tries the full 99 percentiles; on any failure drops one tail pair at
    a time (2..98, then 3..97).  A grid that still fails is marked
    failed and the caller counts the step as omitted.
    """
    for tier in _TIERS:
        drop = (99 - tier) // 2
        levels = np.arange(1 + drop, 100 - drop)
        values, ok = quantile_levels(family, p, levels / 100.0)
        if np.all(ok):
            return QuantileGrid(levels=levels, values=values, tier=tier)
    return QuantileGrid(levels=np.empty(0, dtype=int), values=np.empty(0), tier=TIER_FAILED)


def pinball_value(q: float, a: int, y: float) -> float:
    """Single-quantile pinball loss at percentile index a (1..99)."""
    frac = a / 100.0
    if y < q:
        return (1.0 - frac) * (q - y)
    return frac * (y - q)


def pinball_score(grid: QuantileGrid, y: float) -> float:
    """Mean pinball loss over the grid's levels at realization y."""
    if grid.failed:
        raise EmptyHorizon("cannot score a failed quantile grid")
    frac = grid.levels / 100.0
    diff = grid.values - y
    losses = np.where(diff > 0, (1.0 - frac) * diff, -frac * diff)
    return float(np.mean(losses))


@dataclass
class PinballReport:
    """Per-step scores with omission bookkeeping over a horizon."""

    scores: np.ndarray          # NaN where the step was omitted
    n_omitted: int
    n_evaluated: int
    measure: float

    @property
    def horizon(self) -> int:
        return len(self.scores)


def pinball_measure(scores) -> PinballReport:
    """Average the per-step scores, excluding omitted (NaN) steps."""
    scores = np.asarray(scores, dtype=float)
    mask = np.isfinite(scores)
    n_eval = int(mask.sum())
    if n_eval == 0:
        raise EmptyHorizon("no evaluated steps in the horizon")
    return PinballReport(
        scores=scores,
        n_omitted=int(len(scores) - n_eval),
        n_evaluated=n_eval,
        measure=float(np.mean(scores[mask])),
    )


def rmse(forecast, realized) -> float:
    """Root mean squared error over pairwise-complete entries."""
    f = np.asarray(forecast, dtype=float)
    r = np.asarray(realized, dtype=float)
    mask = np.isfinite(f) & np.isfinite(r)
    if not np.any(mask):
        raise EmptyHorizon("no complete forecast/realization pairs")
    d = f[mask] - r[mask]
    return float(np.sqrt(np.mean(d * d)))
