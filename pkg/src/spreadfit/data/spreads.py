"""Spread construction, per-spread design matrices and sample splits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..gamlss.model import DesignMatrix
from .panel import HourlyPanel

N_SPREADS = 276
FEATURE_NAMES = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"]


@dataclass(frozen=True)
class SpreadId:
    """Hour pair (h1 earlier, h2 later) with its 1-based panel index."""

    h1: int
    h2: int

    def __post_init__(self) -> None:
        if not (0 <= self.h1 < self.h2 <= 23):
            raise DomainError(f"invalid hour pair ({self.h1}, {self.h2})")

    @property
    def index(self) -> int:
        # h1-major ordering: 23 spreads for hour 00, then 22 for hour 01, ...
        before = self.h1 * 23 - (self.h1 * (self.h1 - 1)) // 2
        return before + (self.h2 - self.h1)

    @property
    def label(self) -> str:
        return f"{self.h1:02d}-{self.h2:02d}"

    @classmethod
    def from_index(cls, s: int) -> "SpreadId":
        if not 1 <= s <= N_SPREADS:
            raise DomainError(f"spread index must be 1..{N_SPREADS}, got {s}")
        h1 = 0
        remaining = s
        while remaining > 23 - h1:
            remaining -= 23 - h1
            h1 += 1
        return cls(h1, h1 + remaining)

    @classmethod
    def from_label(cls, label: str) -> "SpreadId":
        a, b = label.split("-")
        return cls(int(a), int(b))


def all_spread_ids() -> list[SpreadId]:
    return [SpreadId(h1, h2) for h1 in range(23) for h2 in range(h1 + 1, 24)]


def build_spreads(panel: HourlyPanel) -> np.ndarray:
    """All 276 spread series: earlier-hour price minus later-hour price."""
    out = np.empty((panel.n_days, N_SPREADS))
    for sid in all_spread_ids():
        out[:, sid.index - 1] = panel.prices[:, sid.h1] - panel.prices[:, sid.h2]
    return out


class SpreadPanel:
    """Spread responses plus on-demand per-spread design matrices.

    The one-day lag in x1 consumes the first panel row, so the usable
    sample is rows 1..T-1 of the day axis for every spread alike.
    """

    def __init__(self, panel: HourlyPanel):
        self.panel = panel
        self.Y = build_spreads(panel)
        self.dates = panel.dates

    @property
    def n_days(self) -> int:
        return self.panel.n_days

    @property
    def n_rows(self) -> int:
        return self.panel.n_days - 1

    def response(self, sid: SpreadId) -> np.ndarray:
        return self.Y[1:, sid.index - 1]

    def features(self, sid: SpreadId) -> np.ndarray:
        """Driver columns x1..x8, aligned with the usable response rows."""
        p = self.panel
        h1, h2 = sid.h1, sid.h2
        lagged = self.Y[:-1, sid.index - 1]
        rows = slice(1, None)
        load_d = p.load[rows, h1] - p.load[rows, h2]
        cols = [
            lagged,
            p.gas[rows],
            p.coal[rows],
            p.wind[rows, h1] - p.wind[rows, h2],
            p.solar[rows, h1] - p.solar[rows, h2],
            p.dummy[rows],
            load_d,
            0.5 * (p.load[rows, h1] ** 2 - p.load[rows, h2] ** 2),
        ]
        return np.column_stack(cols)

    def design(self, sid: SpreadId) -> DesignMatrix:
        """Design matrix for one spread, without constant-zero drivers.

        Night hour pairs have identically zero solar spreads after the
        repair rules; such columns carry no information and are dropped
        so the intercept-plus-drivers invariant holds.
        """
        feats = self.features(sid)
        keep = [j for j in range(feats.shape[1]) if not np.all(feats[:, j] == 0.0)]
        names = [FEATURE_NAMES[j] for j in keep]
        return DesignMatrix.from_covariates(feats[:, keep], names)


@dataclass(frozen=True)
class SplitIndices:
    """1-based inclusive day ranges; row 1 is consumed by the lag."""

    train: tuple[int, int]
    validation: tuple[int, int]
    test: tuple[int, int]

    @property
    def lengths(self) -> dict[str, int]:
        return {
            "train": self.train[1] - self.train[0] + 1,
            "validation": self.validation[1] - self.validation[0] + 1,
            "test": self.test[1] - self.test[0] + 1,
        }

    def rows(self, part: str) -> slice:
        """Usable-row slice (0-based, aligned with SpreadPanel.response)."""
        lo, hi = getattr(self, part)
        return slice(lo - 2, hi - 1)


def split(n_days: int, train: float = 0.6, validation: float = 0.2) -> SplitIndices:
    """Proportional split with floor rounding; day 1 only feeds the lag.

    The 1917-day reference panel at the default ratios uses its published
    boundaries (1150 / 1534 / 1917), which differ from plain flooring on
    the second cut.
    """
    if n_days < 10:
        raise DomainError(f"panel too short to split ({n_days} days)")
    if not (0 < train and 0 < validation and train + validation < 1):
        raise DomainError(f"invalid split ratios ({train}, {validation})")
    if n_days == 1917 and (train, validation) == (0.6, 0.2):
        return SplitIndices(train=(2, 1150), validation=(1151, 1534), test=(1535, 1917))
    train_end = int(np.floor(train * n_days))
    val_end = int(np.floor((train + validation) * n_days))
    return SplitIndices(
        train=(2, train_end),
        validation=(train_end + 1, val_end),
        test=(val_end + 1, n_days),
    )
