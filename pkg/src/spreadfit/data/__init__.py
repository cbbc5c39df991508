"""Market data ingestion, repair, spread construction and diagnostics."""

from importlib import resources

import numpy as np
import pandas as pd

from .diagnostics import AdfResult, DescriptiveStats, adf_test, descriptive_stats
from .io import ingest, load_manifest, read_panel_archive, write_panel_archive
from .panel import (
    HourlyGrid,
    HourlyPanel,
    RepairEntry,
    assemble_panel,
    dst_normalize,
    fill_all_missing,
    fill_missing,
    zero_solar_nights,
)
from .spreads import (
    FEATURE_NAMES,
    N_SPREADS,
    SpreadId,
    SpreadPanel,
    SplitIndices,
    all_spread_ids,
    build_spreads,
    split,
)
from .synthetic import synthetic_panel, write_synthetic_dataset


def german_holidays() -> pd.DatetimeIndex:
    """The packaged 2012-2017 national holiday calendar."""
    with resources.files("spreadfit.data.fixtures").joinpath(
        "holidays_de_2012_2017.csv"
    ).open() as f:
        df = pd.read_csv(f)
    return pd.DatetimeIndex(pd.to_datetime(df["date"]))


def holiday_dummy(dates: pd.DatetimeIndex) -> np.ndarray:
    """Weekend/holiday indicator for a date index (fixture calendar)."""
    hol = set(german_holidays())
    flags = [(d.weekday() >= 5) or (d.normalize() in hol) for d in dates]
    return np.asarray(flags, dtype=float)


__all__ = [
    "HourlyGrid",
    "HourlyPanel",
    "RepairEntry",
    "dst_normalize",
    "fill_missing",
    "fill_all_missing",
    "zero_solar_nights",
    "assemble_panel",
    "ingest",
    "load_manifest",
    "write_panel_archive",
    "read_panel_archive",
    "SpreadId",
    "SpreadPanel",
    "SplitIndices",
    "split",
    "build_spreads",
    "all_spread_ids",
    "N_SPREADS",
    "FEATURE_NAMES",
    "adf_test",
    "descriptive_stats",
    "AdfResult",
    "DescriptiveStats",
    "synthetic_panel",
    "write_synthetic_dataset",
    "german_holidays",
    "holiday_dummy",
]
