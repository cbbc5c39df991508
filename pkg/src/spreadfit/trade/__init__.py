"""Risk-gated single-cycle battery scheduling and P&L backtesting."""

from .backtest import BacktestReport, backtest, run_day_decisions, sweep
from .strategy import (
    DEFAULT_COSTS,
    DEFAULT_LEVELS,
    BacktestConfig,
    Direction,
    TradeDecision,
    candidate_profit,
    realized_pnl,
    risk_gate,
    select_trade,
)

__all__ = [
    "Direction",
    "TradeDecision",
    "BacktestConfig",
    "BacktestReport",
    "DEFAULT_COSTS",
    "DEFAULT_LEVELS",
    "candidate_profit",
    "risk_gate",
    "select_trade",
    "realized_pnl",
    "backtest",
    "run_day_decisions",
    "sweep",
]
