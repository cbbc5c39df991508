"""CSV ingestion: schema validation, repair, panel archive round trip."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import SchemaError
from .panel import HourlyGrid, HourlyPanel, assemble_panel, dst_normalize, fill_all_missing

HOURLY_VARIABLES = ("prices", "wind", "solar", "load")
DAILY_VARIABLES = ("gas", "coal", "dummy")


def _read_csv(path: Path, columns: tuple[str, ...]) -> pd.DataFrame:
    if not path.exists():
        raise SchemaError(f"input file missing: {path}")
    try:
        df = pd.read_csv(path)
    except Exception as exc:
        raise SchemaError(f"{path}: not parseable as CSV ({exc})") from exc
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing} (have {list(df.columns)})")
    if len(df) == 0:
        raise SchemaError(f"{path}: no data rows")
    return df


def read_hourly(path: Path, variable: str) -> HourlyGrid:
    df = _read_csv(path, ("date", "hour", "value"))
    hours = pd.to_numeric(df["hour"], errors="coerce")
    bad = hours.isna() | (hours < 0) | (hours > 23)
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise SchemaError(f"{path}: row {row + 2}: hour must be 0..23, got {df['hour'].iloc[row]!r}")
    df["hour"] = hours.astype(int)
    df["value"] = pd.to_numeric(df["value"], errors="coerce")
    grid = dst_normalize(df[["date", "hour", "value"]], variable=variable)
    return fill_all_missing(grid, variable=variable)


def read_daily(path: Path) -> pd.Series:
    df = _read_csv(path, ("date", "value"))
    values = pd.to_numeric(df["value"], errors="coerce")
    if values.isna().all():
        raise SchemaError(f"{path}: value column is not numeric")
    return pd.Series(values.to_numpy(), index=pd.to_datetime(df["date"]))


def load_manifest(path: Path) -> dict[str, Path]:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"dataset manifest missing: {path}")
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    needed = HOURLY_VARIABLES + DAILY_VARIABLES
    missing = [k for k in needed if k not in spec]
    if missing:
        raise SchemaError(f"{path}: manifest lacks entries for {missing}")
    return {k: (path.parent / spec[k]).resolve() for k in needed}


def ingest(manifest_path: Path) -> HourlyPanel:
    """Read, repair and assemble the full hourly panel."""
    files = load_manifest(Path(manifest_path))
    grids = {v: read_hourly(files[v], v) for v in HOURLY_VARIABLES}
    daily = {v: read_daily(files[v]) for v in DAILY_VARIABLES}
    return assemble_panel(
        prices=grids["prices"],
        wind=grids["wind"],
        solar=grids["solar"],
        load=grids["load"],
        gas=daily["gas"],
        coal=daily["coal"],
        dummy=daily["dummy"],
    )


def write_panel_archive(panel: HourlyPanel, out_dir: Path) -> dict[str, Path]:
    """Persist the repaired panel and its repair log as CSV."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, date in enumerate(panel.dates):
        for hour in range(24):
            rows.append(
                (
                    str(date.date()),
                    hour,
                    repr(float(panel.prices[i, hour])),
                    repr(float(panel.wind[i, hour])),
                    repr(float(panel.solar[i, hour])),
                    repr(float(panel.load[i, hour])),
                    repr(float(panel.gas[i])),
                    repr(float(panel.coal[i])),
                    int(panel.dummy[i]),
                    panel.day_types[i],
                )
            )
    archive = pd.DataFrame(
        rows,
        columns=["date", "hour", "price", "wind", "solar", "load", "gas", "coal", "dummy", "day_type"],
    )
    panel_path = out_dir / "panel.csv"
    archive.to_csv(panel_path, index=False)
    log = pd.DataFrame(
        [(e.date, e.hour, e.variable, e.action, repr(float(e.value))) for e in panel.repair_log],
        columns=["date", "hour", "variable", "action", "value"],
    )
    log_path = out_dir / "repair_log.csv"
    log.to_csv(log_path, index=False)
    return {"panel": panel_path, "repair_log": log_path}


def read_panel_archive(out_dir: Path) -> HourlyPanel:
    path = Path(out_dir) / "panel.csv"
    if not path.exists():
        raise SchemaError(f"panel archive missing: {path}")
    df = pd.read_csv(path)
    dates = pd.DatetimeIndex(sorted(pd.to_datetime(df["date"]).unique()))
    index = {d: i for i, d in enumerate(dates)}
    n = len(dates)
    grids = {v: np.full((n, 24), np.nan) for v in ("price", "wind", "solar", "load")}
    gas = np.full(n, np.nan)
    coal = np.full(n, np.nan)
    dummy = np.zeros(n)
    day_types = ["normal"] * n
    di = df["date"].map(lambda s: index[pd.Timestamp(s)]).to_numpy()
    hi = df["hour"].to_numpy(dtype=int)
    for v in grids:
        grids[v][di, hi] = df[v].to_numpy(dtype=float)
    gas[di] = df["gas"].to_numpy(dtype=float)
    coal[di] = df["coal"].to_numpy(dtype=float)
    dummy[di] = df["dummy"].to_numpy(dtype=float)
    for d, t in zip(di, df["day_type"]):
        day_types[d] = t
    return HourlyPanel(
        dates=dates,
        prices=grids["price"],
        wind=grids["wind"],
        solar=grids["solar"],
        load=grids["load"],
        gas=gas,
        coal=coal,
        dummy=dummy,
        day_types=day_types,
    )
