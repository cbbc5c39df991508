"""Per-day trade construction from forecast densities.

The battery completes exactly one cycle per day and returns to its
opening level b.  A positive expected spread (later hour cheaper) means
discharge early / recharge late, monetizing the stored fraction b; a
negative expectation charges the free fraction (1 - b) early and sells
it at the later hour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from ..errors import DomainError
from ..evaluation.pinball import QuantileGrid


class Direction(str, Enum):
    DISCHARGE_CHARGE = "discharge_charge"  # positive expected spread
    CHARGE_DISCHARGE = "charge_discharge"  # negative expected spread
    NO_TRADE = "no_trade"


@dataclass(frozen=True)
class TradeDecision:
    spread_index: int | None
    direction: Direction
    forecast_profit: float
    gate_level: int | None
    gate_value: float | None

    @classmethod
    def no_trade(cls) -> "TradeDecision":
        return cls(None, Direction.NO_TRADE, 0.0, None, None)


@dataclass(frozen=True)
class BacktestConfig:
    cost: float = 5.0         # roundtrip cost c, EUR/MWh
    start_level: float = 0.0  # opening/closing charge fraction b
    capacity_mwh: float = 1.0
    confidence: float = 0.95

    def __post_init__(self) -> None:
        if not 0.0 <= self.start_level < 1.0:
            raise DomainError(f"start level must lie in [0, 1), got {self.start_level}")
        if self.cost < 0.0:
            raise DomainError(f"cost must be nonnegative, got {self.cost}")
        if not 0.5 < self.confidence < 1.0:
            raise DomainError(f"confidence must lie in (0.5, 1), got {self.confidence}")

    @property
    def tail_level(self) -> int:
        return int(round(100.0 * (1.0 - self.confidence)))


DEFAULT_COSTS = (5.0, 10.0, 15.0)
DEFAULT_LEVELS = tuple(round(0.1 * i, 1) for i in range(10))


def candidate_profit(expected: float, cost: float, start_level: float) -> float:
    """Forecast profit of trading one spread: weighted edge over cost."""
    if math.isnan(expected):
        return math.nan
    if expected > 0:
        return (expected - cost) * start_level
    if expected < 0:
        return (abs(expected) - cost) * (1.0 - start_level)
    return 0.0


def risk_gate(
    grid: QuantileGrid, expected: float, cost: float, confidence: float = 0.95
) -> tuple[bool, int, float]:
    """Confidence check that the trade clears its roundtrip cost.

    Positive expectation reads the lower tail percentile (5th at 95%
    confidence), negative the upper; a failed grid sets the critical
    value to 0 which can never pass.  Returns (passed, level, value).
    """
    tail = int(round(100.0 * (1.0 - confidence)))
    level = tail if expected > 0 else 100 - tail
    q = grid.value_at(level) if not grid.failed else 0.0
    if math.isnan(q):
        q = 0.0
    return (abs(q) > cost, level, q)


def select_trade(
    expected: dict[int, float],
    grids: dict[int, QuantileGrid],
    config: BacktestConfig,
) -> TradeDecision:
    """Best gated candidate by forecast profit for one trading day.

    Spreads with missing forecasts are skipped; days where no gated
    candidate has strictly positive forecast profit are no-trade days.
    Ties break toward the lowest spread index.
    """
    best: TradeDecision | None = None
    for s in sorted(expected):
        e = expected[s]
        if e is None or math.isnan(e) or s not in grids:
            continue
        passed, level, q = risk_gate(grids[s], e, config.cost, config.confidence)
        if not passed:
            continue
        profit = candidate_profit(e, config.cost, config.start_level)
        if math.isnan(profit) or profit <= 0.0:
            continue
        if best is None or profit > best.forecast_profit:
            direction = (
                Direction.DISCHARGE_CHARGE if e > 0 else Direction.CHARGE_DISCHARGE
            )
            best = TradeDecision(s, direction, profit, level, q)
    return best if best is not None else TradeDecision.no_trade()


def realized_pnl(realized: float, direction: Direction, cost: float, start_level: float) -> float:
    """Cash outcome of an executed trade at the realized spread value.

    The leg weights follow the planned direction; an adverse realization
    simply turns the gross edge negative.
    """
    if direction is Direction.NO_TRADE:
        return 0.0
    if direction is Direction.DISCHARGE_CHARGE:
        return (realized - cost) * start_level
    return (-realized - cost) * (1.0 - start_level)
