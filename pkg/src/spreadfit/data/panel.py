"""Hourly panel assembly and repair rules.

Raw per-variable records carry wall-clock (date, hour) stamps, so the two
clock-change days each year arrive with 23 or 25 hourly rows.  Repair
normalizes every day to exactly 24 slots, fills remaining gaps from the
same hour of the trailing week, and zeroes the solar forecast in the
night hours where nonzero entries are sensor noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..errors import CalendarError, InsufficientHistory

NIGHT_HOURS = (22, 23, 0, 1, 2, 3)

DAY_NORMAL = "normal"
DAY_SPRING = "spring"
DAY_FALL = "fall"


@dataclass
class RepairEntry:
    date: str
    hour: int
    variable: str
    action: str
    value: float


@dataclass
class HourlyGrid:
    """One variable on a (days x 24) grid after clock-change repair."""

    dates: pd.DatetimeIndex
    values: np.ndarray
    day_types: list[str]
    log: list[RepairEntry] = field(default_factory=list)


def dst_normalize(records: pd.DataFrame, variable: str = "value") -> HourlyGrid:
    """Regularize raw (date, hour, value) records to 24 slots per day.

    A 23-hour day gains its missing hour as the mean of the two adjacent
    hours; a 25-hour day keeps only the first occurrence of the
    duplicated hour.  Any other hour count raises CalendarError.
    """
    df = records.copy()
    df["date"] = pd.to_datetime(df["date"]).dt.normalize()
    dates = pd.DatetimeIndex(sorted(df["date"].unique()))
    values = np.full((len(dates), 24), np.nan)
    day_types = []
    log: list[RepairEntry] = []
    grouped = df.groupby("date", sort=True)
    for i, (day, group) in enumerate(grouped):
        hours = group["hour"].to_numpy()
        vals = group["value"].to_numpy(dtype=float)
        n = len(hours)
        unique_hours = set(int(h) for h in hours)
        day_str = str(day.date())
        if n == 24 and len(unique_hours) == 24:
            values[i, hours.astype(int)] = vals
            day_types.append(DAY_NORMAL)
        elif n == 23 and len(unique_hours) == 23:
            missing = sorted(set(range(24)) - unique_hours)
            if len(missing) != 1 or missing[0] in (0, 23):
                raise CalendarError(f"{day_str}: cannot interpolate missing hour {missing}")
            h = missing[0]
            values[i, hours.astype(int)] = vals
            filled = 0.5 * (values[i, h - 1] + values[i, h + 1])
            values[i, h] = filled
            day_types.append(DAY_SPRING)
            log.append(RepairEntry(day_str, h, variable, "interpolated", float(filled)))
        elif n == 25 and len(unique_hours) == 24:
            counts = pd.Series(hours.astype(int)).value_counts()
            dup = int(counts[counts > 1].index[0])
            seen = False
            for h, v in zip(hours.astype(int), vals):
                if h == dup and seen:
                    log.append(RepairEntry(day_str, h, variable, "dropped_duplicate", float(v)))
                    continue
                if h == dup:
                    seen = True
                values[i, h] = v
            day_types.append(DAY_FALL)
        else:
            raise CalendarError(f"{day_str}: {n} hourly rows (expected 23/24/25)")
    return HourlyGrid(dates=dates, values=values, day_types=day_types, log=log)


def fill_missing(grid: HourlyGrid, day: int, hour: int) -> float:
    """Mean of the same hour over the previous 7 days.

    On a spring clock-change day the source hour shifts down by one so
    the averaged slots refer to the same wall-clock period.
    """
    if day < 7:
        raise InsufficientHistory(f"need 7 prior days, have {day}")
    src_hour = hour
    if grid.day_types[day] == DAY_SPRING and hour >= 1:
        src_hour = hour - 1
    window = grid.values[day - 7 : day, src_hour]
    if np.any(np.isnan(window)):
        raise InsufficientHistory(f"unfilled history for day {day} hour {hour}")
    return float(np.mean(window))


def fill_all_missing(grid: HourlyGrid, variable: str = "value") -> HourlyGrid:
    """Fill every NaN slot in time order so fills can feed later fills."""
    for day in range(grid.values.shape[0]):
        for hour in np.flatnonzero(np.isnan(grid.values[day])):
            value = fill_missing(grid, day, int(hour))
            grid.values[day, hour] = value
            grid.log.append(
                RepairEntry(str(grid.dates[day].date()), int(hour), variable, "filled_7day", value)
            )
    return grid


def zero_solar_nights(grid: HourlyGrid, variable: str = "solar") -> HourlyGrid:
    for hour in NIGHT_HOURS:
        nonzero = np.flatnonzero(grid.values[:, hour] != 0.0)
        for day in nonzero:
            grid.log.append(
                RepairEntry(
                    str(grid.dates[day].date()), hour, variable, "zeroed_night",
                    float(grid.values[day, hour]),
                )
            )
        grid.values[:, hour] = 0.0
    return grid


@dataclass
class HourlyPanel:
    """Repaired market data: four hourly grids plus daily drivers."""

    dates: pd.DatetimeIndex
    prices: np.ndarray
    wind: np.ndarray
    solar: np.ndarray
    load: np.ndarray
    gas: np.ndarray
    coal: np.ndarray
    dummy: np.ndarray
    day_types: list[str]
    repair_log: list[RepairEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = len(self.dates)
        for name in ("prices", "wind", "solar", "load"):
            arr = getattr(self, name)
            if arr.shape != (n, 24):
                raise CalendarError(f"{name} grid must be ({n}, 24), got {arr.shape}")
        for name in ("gas", "coal", "dummy"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise CalendarError(f"{name} must have one value per day")

    @property
    def n_days(self) -> int:
        return len(self.dates)


def assemble_panel(
    prices: HourlyGrid,
    wind: HourlyGrid,
    solar: HourlyGrid,
    load: HourlyGrid,
    gas: pd.Series,
    coal: pd.Series,
    dummy: pd.Series,
) -> HourlyPanel:
    """Align repaired grids and daily series on the price calendar."""
    dates = prices.dates
    for name, grid in (("wind", wind), ("solar", solar), ("load", load)):
        if not grid.dates.equals(dates):
            raise CalendarError(f"{name} calendar does not match the price calendar")
    solar = zero_solar_nights(solar)

    def daily(series: pd.Series, name: str) -> np.ndarray:
        s = series.copy()
        s.index = pd.to_datetime(s.index).normalize()
        s = s[~s.index.duplicated(keep="first")]
        out = s.reindex(dates).ffill()
        if out.isna().any():
            raise CalendarError(f"{name} has no value on or before {dates[0].date()}")
        return out.to_numpy(dtype=float)

    log = prices.log + wind.log + solar.log + load.log
    return HourlyPanel(
        dates=dates,
        prices=prices.values,
        wind=wind.values,
        solar=solar.values,
        load=load.values,
        gas=daily(gas, "gas"),
        coal=daily(coal, "coal"),
        dummy=daily(dummy, "dummy").astype(int).astype(float),
        day_types=prices.day_types,
        repair_log=log,
    )
