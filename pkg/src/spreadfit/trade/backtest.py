"""P&L accounting over a decision stream and the cost/level sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..errors import EmptyHorizon
from ..evaluation.pinball import QuantileGrid
from .strategy import (
    DEFAULT_COSTS,
    DEFAULT_LEVELS,
    BacktestConfig,
    Direction,
    TradeDecision,
    realized_pnl,
    select_trade,
)


@dataclass(frozen=True)
class BacktestReport:
    """Aggregate P&L statistics for one (cost, start level) setting."""

    pnl_total: float
    pnl_mean: float
    pnl_stderr: float
    n_loss_days: int
    loss_total: float
    loss_mean: float
    n_no_trade: int
    horizon: int
    daily_pnl: np.ndarray

    def as_row(self) -> dict[str, float]:
        return {
            "pnl": self.pnl_total,
            "pnl_mean": self.pnl_mean,
            "pnl_stderr": self.pnl_stderr,
            "n_loss_days": self.n_loss_days,
            "loss_total": self.loss_total,
            "loss_mean": self.loss_mean,
            "no_trade_days": self.n_no_trade,
        }


def backtest(
    decisions: list[TradeDecision],
    realized: list[dict[int, float]],
    config: BacktestConfig,
) -> BacktestReport:
    """Daily P&L aggregates; no-trade days contribute zero and the mean
    denominator is the full horizon."""
    if len(decisions) == 0:
        raise EmptyHorizon("empty decision stream")
    if len(decisions) != len(realized):
        raise EmptyHorizon("decision and realization streams differ in length")
    daily = np.zeros(len(decisions))
    n_no_trade = 0
    for t, decision in enumerate(decisions):
        if decision.direction is Direction.NO_TRADE:
            n_no_trade += 1
            continue
        value = realized[t][decision.spread_index]
        daily[t] = realized_pnl(value, decision.direction, config.cost, config.start_level)
    n = len(daily)
    losses = daily[daily < 0]
    stderr = float(daily.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return BacktestReport(
        pnl_total=float(daily.sum()),
        pnl_mean=float(daily.mean()),
        pnl_stderr=stderr,
        n_loss_days=int(losses.size),
        loss_total=float(losses.sum()),
        loss_mean=float(losses.mean()) if losses.size else 0.0,
        n_no_trade=n_no_trade,
        horizon=n,
        daily_pnl=daily,
    )


def run_day_decisions(
    expected_by_day: list[dict[int, float]],
    grids_by_day: list[dict[int, QuantileGrid]],
    config: BacktestConfig,
) -> list[TradeDecision]:
    return [
        select_trade(expected, grids, config)
        for expected, grids in zip(expected_by_day, grids_by_day)
    ]


def sweep(
    expected_by_day: list[dict[int, float]],
    grids_by_day: list[dict[int, QuantileGrid]],
    realized: list[dict[int, float]],
    costs=DEFAULT_COSTS,
    levels=DEFAULT_LEVELS,
    capacity: float = 1.0,
) -> pd.DataFrame:
    """Full report table over the (cost, start level) grid.

    Decisions are re-derived per cell because both the gate and the leg
    weights depend on (c, b); the best level per cost is flagged.
    """
    rows = []
    for cost in costs:
        for level in levels:
            config = BacktestConfig(cost=cost, start_level=level, capacity_mwh=capacity)
            decisions = run_day_decisions(expected_by_day, grids_by_day, config)
            report = backtest(decisions, realized, config)
            row = {"c": cost, "b": level}
            row.update(report.as_row())
            rows.append(row)
    table = pd.DataFrame(rows)
    table["best_b"] = False
    for cost in costs:
        block = table[table["c"] == cost]
        table.loc[block["pnl"].idxmax(), "best_b"] = True
    return table
