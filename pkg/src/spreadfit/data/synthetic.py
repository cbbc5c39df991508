"""Seeded synthetic market panels for tests and pipeline smoke runs.

Prices respond to load, wind, solar, fuel prices and the weekend dummy
with heavy-tailed, skewed hourly shocks, so fitted spread models find
real coefficients of realistic magnitudes (the interaction-load driver
spans ~1e8 like the production data).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from .panel import DAY_NORMAL, HourlyPanel

_HOURS = np.arange(24)


def _load_shape() -> np.ndarray:
    morning = np.exp(-0.5 * ((_HOURS - 11.0) / 3.5) ** 2)
    evening = np.exp(-0.5 * ((_HOURS - 19.0) / 2.0) ** 2)
    return 0.75 * morning + 0.45 * evening


def _solar_shape() -> np.ndarray:
    shape = np.sin(np.pi * (_HOURS - 5.0) / 15.0)
    shape[(_HOURS < 5) | (_HOURS > 20)] = 0.0
    return np.clip(shape, 0.0, None)


def synthetic_panel(n_days: int = 300, seed: int = 0) -> HourlyPanel:
    """Generate a repaired panel directly (no clock-change days)."""
    rng = np.random.default_rng(seed)
    dates = pd.date_range("2015-01-01", periods=n_days, freq="D")
    dow = (np.arange(n_days) + 3) % 7
    dummy = ((dow == 5) | (dow == 6)).astype(float)
    holidays = rng.choice(np.arange(n_days), size=max(2, n_days // 60), replace=False)
    dummy[holidays] = 1.0

    season = 1.0 + 0.25 * np.sin(2.0 * np.pi * np.arange(n_days) / 365.0 + 0.3)

    gas = np.empty(n_days)
    gas[0] = 20.0
    coal = np.empty(n_days)
    coal[0] = 60.0
    for t in range(1, n_days):
        gas[t] = 20.0 + 0.95 * (gas[t - 1] - 20.0) + rng.normal(0.0, 0.6)
        coal[t] = 60.0 + 0.98 * (coal[t - 1] - 60.0) + rng.normal(0.0, 0.5)

    load = (
        38000.0
        + 14000.0 * _load_shape()[None, :] * season[:, None]
        - 5200.0 * dummy[:, None]
        + rng.normal(0.0, 900.0, size=(n_days, 24))
    )
    wind_level = np.exp(rng.normal(8.3, 0.55, size=n_days))
    wind = np.clip(
        wind_level[:, None] * (1.0 + 0.35 * rng.normal(size=(n_days, 24))), 50.0, None
    )
    solar_level = np.exp(rng.normal(8.6, 0.4, size=n_days)) * season
    solar = np.clip(
        solar_level[:, None] * _solar_shape()[None, :] * (1.0 + 0.15 * rng.normal(size=(n_days, 24))),
        0.0,
        None,
    )

    daily_shock = np.empty(n_days)
    daily_shock[0] = 0.0
    for t in range(1, n_days):
        daily_shock[t] = 0.6 * daily_shock[t - 1] + rng.normal(0.0, 1.8)
    hour_noise = 2.6 * rng.standard_t(5, size=(n_days, 24))
    spikes = rng.uniform(size=(n_days, 24)) < 0.01
    hour_noise = hour_noise + spikes * rng.gamma(2.0, 8.0, size=(n_days, 24))

    prices = (
        -12.0
        + 0.85 * gas[:, None]
        + 0.11 * coal[:, None]
        + 9.5e-4 * load
        - 6.0e-4 * wind
        - 7.5e-4 * solar
        - 3.5 * dummy[:, None]
        + daily_shock[:, None]
        + hour_noise
    )

    return HourlyPanel(
        dates=pd.DatetimeIndex(dates),
        prices=prices,
        wind=wind,
        solar=solar,
        load=load,
        gas=gas,
        coal=coal,
        dummy=dummy,
        day_types=[DAY_NORMAL] * n_days,
        repair_log=[],
    )


def write_synthetic_dataset(
    out_dir: Path,
    n_days: int = 300,
    seed: int = 0,
    with_clock_changes: bool = True,
    missing_slots: int = 3,
) -> Path:
    """Write raw long-format CSVs plus a manifest; returns manifest path.

    With clock changes enabled, one day loses its hour 02 (spring) and
    one day repeats it (fall); a few wind slots are blanked so ingestion
    exercises the 7-day fill.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    panel = synthetic_panel(n_days=n_days, seed=seed)
    rng = np.random.default_rng(seed + 1)

    spring_day = n_days // 3
    fall_day = (2 * n_days) // 3

    def hourly_frame(values: np.ndarray, variable: str) -> pd.DataFrame:
        rows = []
        for i, date in enumerate(panel.dates):
            d = str(date.date())
            for hour in range(24):
                if with_clock_changes and i == spring_day and hour == 2:
                    continue
                rows.append((d, hour, repr(float(values[i, hour]))))
                if with_clock_changes and i == fall_day and hour == 2:
                    shifted = float(values[i, hour]) + 4.0
                    rows.append((d, hour, repr(shifted)))
        return pd.DataFrame(rows, columns=["date", "hour", "value"])

    frames = {
        "prices": hourly_frame(panel.prices, "prices"),
        "wind": hourly_frame(panel.wind, "wind"),
        "solar": hourly_frame(panel.solar, "solar"),
        "load": hourly_frame(panel.load, "load"),
    }
    if missing_slots:
        # blank (not drop) some wind values so the 7-day fill runs; keep
        # clear of the first week and the clock-change days
        wind = frames["wind"]
        lo = str(panel.dates[8].date())
        hi = str(panel.dates[min(spring_day, n_days) - 2].date())
        eligible = wind.index[(wind["date"] > lo) & (wind["date"] < hi)]
        blank = rng.choice(eligible, size=missing_slots, replace=False)
        wind.loc[blank, "value"] = ""

    manifest = {}
    for name, frame in frames.items():
        path = out_dir / f"{name}.csv"
        frame.to_csv(path, index=False)
        manifest[name] = path.name
    for name, series in (("gas", panel.gas), ("coal", panel.coal), ("dummy", panel.dummy)):
        path = out_dir / f"{name}.csv"
        pd.DataFrame(
            {"date": [str(d.date()) for d in panel.dates], "value": [repr(float(v)) for v in series]}
        ).to_csv(path, index=False)
        manifest[name] = path.name
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2))
    return manifest_path
